//! Constituent tagger outputs: heuristic stand-ins for SWUM, POSSE and a
//! Stanford-style lexicon tagger, and pass-through of precomputed columns.
//!
//! The stand-ins approximate the behaviour of the original tools (verb
//! detection from position and return type, POSSE's merged closed-list
//! category, Stanford's English-centric lexicon with the `I` prefix on
//! function names). They are not reimplementations.

use std::collections::HashMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::corpus::IdentifierRecord;
use crate::error::{Error, Result};
use crate::tagset::{map_penn_to_reduced, Conjugation, IdentifierContext, PennTag, StanfordLabel, Tag};

/// Per-word outputs of the three constituent taggers; `None` is MISSING.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ConstituentTags {
    pub swum: Option<Tag>,
    pub posse: Option<Tag>,
    pub stanford: Option<StanfordLabel>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Tagger {
    Swum,
    Posse,
    Stanford,
}

impl Tagger {
    pub const ALL: [Tagger; 3] = [Tagger::Swum, Tagger::Posse, Tagger::Stanford];

    pub fn as_str(self) -> &'static str {
        match self {
            Tagger::Swum => "swum",
            Tagger::Posse => "posse",
            Tagger::Stanford => "stanford",
        }
    }
}

impl fmt::Display for Tagger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Tagger {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Tagger::ALL
            .into_iter()
            .find(|t| t.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::invalid(format!("unknown tagger {s}")))
    }
}

/// Case-insensitive word to Penn tag table. The first line for a word wins.
#[derive(Debug, Clone, Default)]
pub struct Lexicon {
    entries: HashMap<String, PennTag>,
}

const EMBEDDED_LEXICON: &str = include_str!("../data/lexicon.tsv");

impl Lexicon {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = HashMap::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (word, tag) = line
                .split_once('\t')
                .ok_or_else(|| Error::parse(n + 1, "expected `word<TAB>tag`"))?;
            let tag: PennTag = tag
                .trim()
                .parse()
                .map_err(|_| Error::parse(n + 1, format!("unknown tag {tag}")))?;
            entries.entry(word.to_lowercase()).or_insert(tag);
        }
        Ok(Lexicon { entries })
    }

    pub fn load(path: &Path) -> Result<Self> {
        Lexicon::parse(&std::fs::read_to_string(path)?)
    }

    /// The built-in frequency-ranked English lexicon.
    pub fn embedded() -> &'static Lexicon {
        static LEXICON: OnceLock<Lexicon> = OnceLock::new();
        LEXICON.get_or_init(|| Lexicon::parse(EMBEDDED_LEXICON).expect("embedded lexicon is valid"))
    }

    pub fn get(&self, word: &str) -> Option<PennTag> {
        self.entries.get(&word.to_lowercase()).copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

// Verbs that commonly lead function names.
const VERBS: &[&str] = &[
    "abort",
    "accept",
    "access",
    "activate",
    "add",
    "adjust",
    "align",
    "alloc",
    "allocate",
    "allow",
    "append",
    "apply",
    "assert",
    "assign",
    "attach",
    "begin",
    "bind",
    "build",
    "calc",
    "calculate",
    "call",
    "cancel",
    "check",
    "choose",
    "clamp",
    "clean",
    "cleanup",
    "clear",
    "clip",
    "clone",
    "close",
    "collect",
    "combine",
    "commit",
    "compare",
    "compile",
    "complete",
    "compute",
    "configure",
    "connect",
    "construct",
    "contains",
    "convert",
    "copy",
    "count",
    "create",
    "decode",
    "decrement",
    "delete",
    "deliver",
    "destroy",
    "detach",
    "detect",
    "disable",
    "dispatch",
    "display",
    "dispose",
    "do",
    "draw",
    "drop",
    "dump",
    "emit",
    "enable",
    "encode",
    "end",
    "ensure",
    "enter",
    "erase",
    "evaluate",
    "execute",
    "exit",
    "expand",
    "export",
    "extract",
    "fetch",
    "fill",
    "filter",
    "find",
    "finish",
    "fire",
    "fix",
    "flush",
    "format",
    "free",
    "generate",
    "get",
    "grab",
    "handle",
    "has",
    "hide",
    "import",
    "increment",
    "init",
    "initialize",
    "insert",
    "install",
    "invalidate",
    "invoke",
    "is",
    "iterate",
    "join",
    "keep",
    "kill",
    "launch",
    "leave",
    "list",
    "load",
    "lock",
    "log",
    "lookup",
    "make",
    "map",
    "mark",
    "match",
    "merge",
    "move",
    "need",
    "normalize",
    "notify",
    "open",
    "parse",
    "pause",
    "perform",
    "pop",
    "post",
    "prepare",
    "print",
    "process",
    "push",
    "put",
    "query",
    "queue",
    "read",
    "rebuild",
    "receive",
    "record",
    "redraw",
    "refresh",
    "register",
    "release",
    "reload",
    "remove",
    "render",
    "reorder",
    "repaint",
    "replace",
    "report",
    "request",
    "reset",
    "resize",
    "resolve",
    "restore",
    "resume",
    "retrieve",
    "return",
    "reverse",
    "rotate",
    "run",
    "save",
    "scale",
    "scan",
    "search",
    "select",
    "send",
    "serialize",
    "set",
    "setup",
    "should",
    "show",
    "shutdown",
    "skip",
    "sort",
    "split",
    "start",
    "stop",
    "store",
    "submit",
    "swap",
    "sync",
    "take",
    "test",
    "toggle",
    "transform",
    "translate",
    "trigger",
    "try",
    "unlock",
    "unregister",
    "update",
    "use",
    "validate",
    "verify",
    "visit",
    "wait",
    "wake",
    "walk",
    "write",
];

const BOOLEAN_VERBS: &[&str] = &[
    "is", "has", "can", "should", "will", "was", "does", "did", "are", "have", "needs", "contains", "allows",
    "supports", "uses", "must",
];

const PREPOSITIONS: &[&str] = &[
    "about", "above", "across", "after", "against", "along", "among", "around", "as", "at", "before", "behind",
    "below", "beneath", "beside", "between", "beyond", "by", "down", "during", "except", "for", "from", "in", "inside",
    "into", "near", "of", "off", "on", "onto", "out", "outside", "over", "per", "since", "through", "to", "toward",
    "towards", "under", "until", "up", "upon", "via", "with", "within", "without",
];

const DETERMINERS: &[&str] = &[
    "a", "all", "an", "another", "any", "each", "every", "no", "some", "that", "the", "these", "this", "those", "which",
];

const PRONOUNS: &[&str] = &[
    "he", "her", "him", "his", "i", "it", "its", "me", "mine", "my", "our", "ours", "she", "their", "them", "they",
    "us", "we", "you", "your",
];

const PREAMBLE_PREFIXES: &[&str] = &["egl", "gimp", "gl", "glew", "gtk", "qt", "wx"];

fn lower(word: &str) -> String {
    word.to_lowercase()
}

fn is_number(word: &str) -> bool {
    let w = word.to_ascii_lowercase();
    if let Some(hex) = w.strip_prefix("0x") {
        return !hex.is_empty() && hex.chars().all(|c| c.is_ascii_hexdigit());
    }
    !w.is_empty() && w.chars().all(|c| c.is_numeric())
}

fn is_verb(word: &str) -> bool {
    VERBS.binary_search(&word).is_ok()
}

fn is_closed_list(word: &str) -> bool {
    PREPOSITIONS.contains(&word) || DETERMINERS.contains(&word) || PRONOUNS.contains(&word)
}

fn is_preamble_candidate(word: &str, len: usize) -> bool {
    len > 1
        && ((word.chars().count() == 1 && word.chars().all(char::is_alphabetic)) || PREAMBLE_PREFIXES.contains(&word))
}

fn looks_plural(word: &str, lexicon: &Lexicon) -> bool {
    match lexicon.get(word) {
        Some(p) => matches!(p, PennTag::NNS | PennTag::NNPS),
        None => word.len() > 3 && word.ends_with('s') && !word.ends_with("ss"),
    }
}

/// True for declared types that hint at a predicate: booleans, or integers
/// carried by is/has names.
fn predicate_hint(type_hint: &str, first_word: &str) -> bool {
    let t = type_hint
        .trim()
        .trim_end_matches(['*', '&'])
        .trim()
        .to_ascii_lowercase();
    let booleanish = matches!(t.as_str(), "bool" | "boolean" | "gboolean" | "_bool" | "jboolean");
    let int_predicate = matches!(t.as_str(), "int" | "gint") && matches!(first_word, "is" | "has");
    (booleanish && BOOLEAN_VERBS.contains(&first_word)) || int_predicate
}

fn require_words<S: AsRef<str>>(words: &[S]) -> Result<()> {
    if words.is_empty() {
        Err(Error::invalid("cannot tag an empty word list"))
    } else {
        Ok(())
    }
}

fn lexicon_penn(word: &str, lexicon: &Lexicon) -> PennTag {
    if is_number(word) {
        return PennTag::CD;
    }
    if let Some(p) = lexicon.get(word) {
        return p;
    }
    if word.ends_with("ed") {
        PennTag::VBD
    } else if word.ends_with("ing") {
        PennTag::VBG
    } else if word.ends_with("ly") {
        PennTag::RB
    } else if word.ends_with('s') && !word.ends_with("ss") {
        PennTag::NNS
    } else {
        PennTag::NN
    }
}

/// Stanford-style tagging: lexicon lookup with suffix fallbacks. Function
/// names get a synthetic leading pronoun, so a verb-capable first word reads
/// as a verb.
pub fn tag_lexicon<S: AsRef<str>>(
    words: &[S],
    context: IdentifierContext,
    conjugation: Conjugation,
    lexicon: &Lexicon,
) -> Result<Vec<StanfordLabel>> {
    require_words(words)?;
    let mut after_pronoun = context == IdentifierContext::Function;
    let mut out = Vec::with_capacity(words.len());
    for word in words {
        let w = lower(word.as_ref());
        let mut penn = lexicon_penn(&w, lexicon);
        if after_pronoun
            && is_verb(&w)
            && !matches!(
                penn,
                PennTag::VB | PennTag::VBP | PennTag::VBZ | PennTag::VBD | PennTag::MD
            )
        {
            penn = PennTag::VBP;
        }
        after_pronoun = penn == PennTag::PRP;
        out.push(map_penn_to_reduced(penn, conjugation, context));
    }
    Ok(out)
}

/// SWUM-style tagging: verb detection at the head of function names,
/// noun-phrase shaping elsewhere. Never emits NPL, VM or CJ.
pub fn tag_swum_like<S: AsRef<str>>(words: &[S], context: IdentifierContext, type_hint: &str) -> Result<Vec<Tag>> {
    require_words(words)?;
    let n = words.len();
    let lowered: Vec<String> = words.iter().map(|w| lower(w.as_ref())).collect();
    let predicate = predicate_hint(type_hint, &lowered[0]);
    let tags = lowered
        .iter()
        .enumerate()
        .map(|(i, w)| {
            if i == 0 && is_preamble_candidate(w, n) {
                Tag::Preamble
            } else if is_number(w) {
                Tag::Digit
            } else if PREPOSITIONS.contains(&w.as_str()) {
                Tag::Preposition
            } else if DETERMINERS.contains(&w.as_str()) {
                Tag::Determiner
            } else if PRONOUNS.contains(&w.as_str()) {
                Tag::Pronoun
            } else if i == 0 && (predicate || (context == IdentifierContext::Function && is_verb(w))) {
                Tag::Verb
            } else if i == n - 1 {
                Tag::Noun
            } else {
                Tag::NounModifier
            }
        })
        .collect();
    Ok(tags)
}

/// POSSE-style tagging: prepositions, determiners and pronouns collapse into
/// the closed list (reported as P); no plural, conjunction or preamble
/// support, so plurals come out as nouns.
pub fn tag_posse_like<S: AsRef<str>>(
    words: &[S],
    context: IdentifierContext,
    type_hint: &str,
    lexicon: &Lexicon,
) -> Result<Vec<Tag>> {
    require_words(words)?;
    let n = words.len();
    let lowered: Vec<String> = words.iter().map(|w| lower(w.as_ref())).collect();
    let predicate = predicate_hint(type_hint, &lowered[0]);
    let tags = lowered
        .iter()
        .enumerate()
        .map(|(i, w)| {
            let verbish = is_verb(w) || matches!(lexicon.get(w), Some(PennTag::VB | PennTag::VBP | PennTag::VBZ));
            if is_closed_list(w) {
                Tag::Preposition
            } else if is_number(w) {
                Tag::Digit
            } else if i == 0 && (predicate || (context == IdentifierContext::Function && verbish)) {
                Tag::Verb
            } else if i == n - 1 || looks_plural(w, lexicon) {
                Tag::Noun
            } else {
                Tag::NounModifier
            }
        })
        .collect();
    Ok(tags)
}

/// Runs the stand-ins for the tagger columns a record lacks. Precomputed
/// columns are left untouched. Stanford output is stored in conjugated form;
/// normalization happens at feature time.
pub fn fill_missing(record: &mut IdentifierRecord, lexicon: &Lexicon) -> Result<()> {
    let words = &record.words;
    if !record.has_column(Tagger::Swum) {
        let tags = tag_swum_like(words, record.context, &record.type_hint)?;
        for (c, t) in record.constituent.iter_mut().zip(tags) {
            c.swum = Some(t);
        }
    }
    if !record.has_column(Tagger::Posse) {
        let tags = tag_posse_like(words, record.context, &record.type_hint, lexicon)?;
        for (c, t) in record.constituent.iter_mut().zip(tags) {
            c.posse = Some(t);
        }
    }
    if !record.has_column(Tagger::Stanford) {
        let tags = tag_lexicon(words, record.context, Conjugation::Conjugated, lexicon)?;
        for (c, t) in record.constituent.iter_mut().zip(tags) {
            c.stanford = Some(t);
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use IdentifierContext::*;

    fn lex() -> &'static Lexicon {
        Lexicon::embedded()
    }

    #[test]
    fn word_lists_are_sorted_for_binary_search() {
        assert!(VERBS.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn embedded_lexicon_loads() {
        assert_eq!(lex().len(), 25_000);
        assert_eq!(lex().get("run"), Some(PennTag::VB));
        assert_eq!(lex().get("Dogs"), Some(PennTag::NNS));
    }

    #[test]
    fn lexicon_examples() {
        assert_eq!(
            tag_lexicon(&["run"], Function, Conjugation::Normalized, lex()).unwrap(),
            vec![StanfordLabel::Tag(Tag::Verb)]
        );
        assert_eq!(
            tag_lexicon(&["dogs"], Declaration, Conjugation::Normalized, lex()).unwrap(),
            vec![StanfordLabel::Tag(Tag::NounPlural)]
        );
        let empty: [&str; 0] = [];
        assert!(tag_lexicon(&empty, Function, Conjugation::Normalized, lex()).is_err());
    }

    #[test]
    fn pronoun_prefix_turns_function_heads_into_verbs() {
        // "list" is a noun in the lexicon.
        let decl = tag_lexicon(&["list", "items"], Declaration, Conjugation::Normalized, lex()).unwrap();
        let func = tag_lexicon(&["list", "items"], Function, Conjugation::Normalized, lex()).unwrap();
        assert_eq!(decl[0], StanfordLabel::Tag(Tag::Noun));
        assert_eq!(func[0], StanfordLabel::Tag(Tag::Verb));
    }

    #[test]
    fn suffix_fallbacks() {
        let lx = Lexicon::default();
        let got = tag_lexicon(
            &["frobbed", "frobbing", "frobly", "frobs", "frob", "42"],
            Class,
            Conjugation::Conjugated,
            &lx,
        )
        .unwrap();
        assert_eq!(
            got,
            vec![
                StanfordLabel::Conjugation(PennTag::VBD),
                StanfordLabel::Conjugation(PennTag::VBG),
                StanfordLabel::Tag(Tag::VerbModifier),
                StanfordLabel::Tag(Tag::NounPlural),
                StanfordLabel::Tag(Tag::Noun),
                StanfordLabel::Tag(Tag::Digit),
            ]
        );
    }

    #[test]
    fn swum_examples() {
        use Tag::*;
        assert_eq!(
            tag_swum_like(&["Get", "User", "Token"], Function, "Token").unwrap(),
            [Verb, NounModifier, Noun]
        );
        assert_eq!(
            tag_swum_like(&["tile", "list", "head"], Declaration, "GList*").unwrap(),
            [NounModifier, NounModifier, Noun]
        );
        assert_eq!(
            tag_swum_like(&["g", "list", "last"], Function, "GList*").unwrap(),
            [Preamble, NounModifier, Noun]
        );
        assert_eq!(
            tag_swum_like(&["is", "empty"], Attribute, "bool").unwrap(),
            [Verb, Noun]
        );
        assert_eq!(
            tag_swum_like(&["has", "items"], Declaration, "int").unwrap(),
            [Verb, Noun]
        );
    }

    #[test]
    fn posse_examples() {
        use Tag::*;
        assert_eq!(
            tag_posse_like(&["the", "list"], Declaration, "GList*", lex()).unwrap(),
            [Preposition, Noun]
        );
        assert_eq!(
            tag_posse_like(&["Get", "User", "Token"], Function, "Token", lex()).unwrap(),
            [Verb, NounModifier, Noun]
        );
        assert_eq!(tag_posse_like(&["items"], Parameter, "vector", lex()).unwrap(), [Noun]);
        assert_eq!(
            tag_posse_like(&["m", "count"], Attribute, "int", lex()).unwrap(),
            [NounModifier, Noun]
        );
    }

    fn word() -> impl Strategy<Value = String> {
        prop_oneof![
            "[a-z]{1,9}",
            "[0-9]{1,3}",
            Just("the".to_string()),
            Just("and".to_string()),
            Just("to".to_string()),
            Just("get".to_string()),
            Just("items".to_string()),
            Just("quickly".to_string()),
            Just("sorted".to_string()),
        ]
    }

    proptest! {
        #[test]
        fn support_constraints_hold(
            words in prop::collection::vec(word(), 1..7),
            ctx in 0usize..5,
            hint in prop_oneof![Just(""), Just("bool"), Just("int"), Just("GList*")],
        ) {
            let context = IdentifierContext::ALL[ctx];
            let swum = tag_swum_like(&words, context, hint).unwrap();
            let posse = tag_posse_like(&words, context, hint, lex()).unwrap();
            let stanford = tag_lexicon(&words, context, Conjugation::Conjugated, lex()).unwrap();
            prop_assert_eq!(swum.len(), words.len());
            prop_assert_eq!(posse.len(), words.len());
            prop_assert_eq!(stanford.len(), words.len());
            for t in &swum {
                prop_assert!(!matches!(t, Tag::NounPlural | Tag::VerbModifier | Tag::Conjunction | Tag::Other));
            }
            for t in &posse {
                prop_assert!(!matches!(t, Tag::NounPlural | Tag::Conjunction | Tag::Preamble | Tag::Other));
            }
            for t in &stanford {
                prop_assert!(!matches!(t, StanfordLabel::Tag(Tag::Preamble) | StanfordLabel::Tag(Tag::Other)));
            }
            prop_assert_eq!(&swum, &tag_swum_like(&words, context, hint).unwrap());
            prop_assert_eq!(&stanford, &tag_lexicon(&words, context, Conjugation::Conjugated, lex()).unwrap());
        }
    }
}
