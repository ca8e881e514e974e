//! Shallow, token-level identifier extraction from C, C++ and Java sources.
//!
//! This is not a parser. It tracks brace scopes and classifies each
//! statement by shape: class heads, function heads (definitions and
//! prototypes), parameters, attribute and variable declarations. Code that
//! leans on macros or unusual syntax will be missed or misread.

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use walkdir::WalkDir;

use super::IdentifierRecord;
use crate::error::{Error, Result};
use crate::tagset::IdentifierContext;

const EXTENSIONS: &[&str] = &["c", "h", "cpp", "hpp", "java"];

#[derive(Debug, Clone, Default)]
pub struct ExtractOptions {
    /// System name stamped on every record; defaults to the root directory
    /// name.
    pub system: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Hit {
    pub context: IdentifierContext,
    pub name: String,
    pub type_hint: String,
}

fn mentions_test(name: &str) -> bool {
    name.to_ascii_lowercase().contains("test")
}

fn source_files(root: &Path) -> Vec<PathBuf> {
    WalkDir::new(root)
        .sort_by_file_name()
        .into_iter()
        .filter_entry(|e| e.depth() == 0 || !mentions_test(&e.file_name().to_string_lossy()))
        .filter_map(|e| match e {
            Ok(e) => Some(e),
            Err(err) => {
                log::warn!("skipping unreadable entry: {err}");
                None
            }
        })
        .filter(|e| e.file_type().is_file())
        .filter(|e| {
            e.path()
                .extension()
                .and_then(|x| x.to_str())
                .is_some_and(|x| EXTENSIONS.contains(&x.to_ascii_lowercase().as_str()))
        })
        .map(|e| e.into_path())
        .collect()
}

/// Walks `root`, skipping anything whose directory, file, class or function
/// name mentions "test", and returns one untagged record per distinct
/// (context, name, type) triple in path-sorted order.
pub fn extract_identifiers(root: &Path, options: &ExtractOptions) -> Result<Vec<IdentifierRecord>> {
    if !root.is_dir() {
        return Err(Error::invalid(format!("{} is not a directory", root.display())));
    }
    let system = options.system.clone().unwrap_or_else(|| {
        root.canonicalize()
            .ok()
            .and_then(|p| p.file_name().map(|n| n.to_string_lossy().into_owned()))
            .unwrap_or_else(|| "system".to_string())
    });

    let files = source_files(root);
    let per_file: Vec<Vec<Hit>> = files
        .par_iter()
        .map(|path| match std::fs::read(path) {
            Ok(bytes) => extract_from_source(&String::from_utf8_lossy(&bytes)),
            Err(err) => {
                log::warn!("skipping {}: {err}", path.display());
                Vec::new()
            }
        })
        .collect();

    let mut seen = HashSet::new();
    let mut records = Vec::new();
    for hit in per_file.into_iter().flatten() {
        if !seen.insert((hit.context, hit.name.clone(), hit.type_hint.clone())) {
            continue;
        }
        let id = format!("{system}:{}", records.len() + 1);
        match IdentifierRecord::new(id, system.clone(), hit.context, hit.type_hint, hit.name) {
            Ok(r) => records.push(r),
            Err(err) => log::debug!("dropping identifier: {err}"),
        }
    }
    Ok(records)
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Punct(&'static str),
    Number,
    Literal,
}

impl Tok {
    fn ident(&self) -> Option<&str> {
        match self {
            Tok::Ident(s) => Some(s),
            _ => None,
        }
    }

    fn is(&self, p: &str) -> bool {
        matches!(self, Tok::Punct(q) if *q == p)
    }

    fn is_word(&self, w: &str) -> bool {
        self.ident() == Some(w)
    }
}

const PUNCT: &[&str] = &[
    "...", "::", "->", "(", ")", "{", "}", "[", "]", "<", ">", ";", ",", "=", "*", "&", ":", ".", "~", "!", "+", "-",
    "/", "%", "^", "|", "?", "@",
];

fn lex(src: &str) -> Vec<Tok> {
    let chars: Vec<char> = src.chars().collect();
    let mut toks = Vec::new();
    let mut i = 0;
    let mut line_start = true;
    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            line_start = true;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if line_start && c == '#' {
            // Preprocessor directive, with line continuations.
            while i < chars.len() && chars[i] != '\n' {
                if chars[i] == '\\' && chars.get(i + 1) == Some(&'\n') {
                    i += 1;
                }
                i += 1;
            }
            continue;
        }
        line_start = false;
        if c == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'*') {
            i += 2;
            while i < chars.len() && !(chars[i] == '*' && chars.get(i + 1) == Some(&'/')) {
                i += 1;
            }
            i += 2;
            continue;
        }
        if c == '"' || c == '\'' {
            i += 1;
            while i < chars.len() && chars[i] != c && chars[i] != '\n' {
                if chars[i] == '\\' {
                    i += 1;
                }
                i += 1;
            }
            i += 1;
            toks.push(Tok::Literal);
            continue;
        }
        if c.is_alphabetic() || c == '_' || c == '$' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_' || chars[i] == '$') {
                i += 1;
            }
            toks.push(Tok::Ident(chars[start..i].iter().collect()));
            continue;
        }
        if c.is_ascii_digit() {
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '.' || chars[i] == '_') {
                i += 1;
            }
            toks.push(Tok::Number);
            continue;
        }
        // PUNCT lists longer operators first.
        match PUNCT
            .iter()
            .find(|p| p.chars().eq(chars[i..chars.len().min(i + p.len())].iter().copied()))
        {
            Some(p) => {
                toks.push(Tok::Punct(p));
                i += p.len();
            }
            None => i += 1,
        }
    }
    strip_annotations(toks)
}

/// Drops Java annotations (`@Name` and `@Name(...)`).
fn strip_annotations(toks: Vec<Tok>) -> Vec<Tok> {
    let mut out = Vec::with_capacity(toks.len());
    let mut i = 0;
    while i < toks.len() {
        if toks[i].is("@") && toks.get(i + 1).and_then(Tok::ident).is_some_and(|w| w != "interface") {
            i += 2;
            while toks.get(i).is_some_and(|t| t.is(".")) && toks.get(i + 1).and_then(Tok::ident).is_some() {
                i += 2;
            }
            if toks.get(i).is_some_and(|t| t.is("(")) {
                let mut depth = 0;
                while i < toks.len() {
                    if toks[i].is("(") {
                        depth += 1;
                    } else if toks[i].is(")") {
                        depth -= 1;
                        if depth == 0 {
                            i += 1;
                            break;
                        }
                    }
                    i += 1;
                }
            }
            continue;
        }
        out.push(toks[i].clone());
        i += 1;
    }
    out
}

const MODIFIERS: &[&str] = &[
    "public",
    "private",
    "protected",
    "static",
    "final",
    "abstract",
    "synchronized",
    "native",
    "virtual",
    "inline",
    "explicit",
    "extern",
    "constexpr",
    "override",
    "transient",
    "volatile",
    "friend",
    "register",
    "mutable",
    "default",
    "strictfp",
    "__inline",
    "static_inline",
];

const STATEMENT_KEYWORDS: &[&str] = &[
    "return",
    "using",
    "typedef",
    "import",
    "package",
    "goto",
    "break",
    "continue",
    "throw",
    "delete",
    "case",
    "default",
    "if",
    "while",
    "for",
    "do",
    "else",
    "switch",
    "static_assert",
    "assert",
    "yield",
    "namespace",
    "template",
    "new",
    "sizeof",
    "catch",
    "try",
    "finally",
    "synchronized",
    "operator",
];

const CONTROL: &[&str] = &[
    "if",
    "for",
    "while",
    "switch",
    "catch",
    "synchronized",
    "return",
    "sizeof",
    "new",
    "else",
    "do",
    "try",
    "finally",
    "foreach",
    "alignof",
    "decltype",
    "typeof",
    "defined",
];

const TYPE_KEYWORDS: &[&str] = &["class", "struct", "interface", "enum", "union"];

#[derive(Debug)]
enum ScopeKind {
    Class,
    Body,
    Initializer,
}

#[derive(Debug)]
struct Scope {
    kind: ScopeKind,
    suppressed: bool,
    saved: Option<(Vec<Tok>, usize)>,
}

pub(crate) fn extract_from_source(src: &str) -> Vec<Hit> {
    let toks = lex(src);
    let mut hits = Vec::new();
    let mut scopes: Vec<Scope> = Vec::new();
    let mut stmt: Vec<Tok> = Vec::new();
    let mut paren = 0usize;

    let in_initializer = |scopes: &[Scope]| scopes.iter().any(|s| matches!(s.kind, ScopeKind::Initializer));

    for tok in toks {
        match &tok {
            Tok::Punct("(") => {
                paren += 1;
                stmt.push(tok);
            }
            Tok::Punct(")") => {
                paren = paren.saturating_sub(1);
                stmt.push(tok);
            }
            Tok::Punct("{") => {
                let suppressed = scopes.last().is_some_and(|s| s.suppressed);
                if paren > 0 || in_initializer(&scopes) {
                    scopes.push(Scope {
                        kind: if in_initializer(&scopes) {
                            ScopeKind::Initializer
                        } else {
                            ScopeKind::Body
                        },
                        suppressed,
                        saved: Some((std::mem::take(&mut stmt), paren)),
                    });
                    paren = 0;
                    continue;
                }
                let in_class = scopes.last().is_some_and(|s| matches!(s.kind, ScopeKind::Class));
                let scope = classify_block(&stmt, in_class, suppressed, &mut hits);
                let keep = matches!(scope.kind, ScopeKind::Initializer) || scope.saved.is_some();
                let saved = if keep {
                    Some((std::mem::take(&mut stmt), 0))
                } else {
                    None
                };
                stmt.clear();
                scopes.push(Scope { saved, ..scope });
            }
            Tok::Punct("}") => {
                stmt.clear();
                paren = 0;
                if let Some(scope) = scopes.pop() {
                    if let Some((s, p)) = scope.saved {
                        stmt = s;
                        paren = p;
                    }
                }
            }
            Tok::Punct(";") if paren == 0 => {
                if !in_initializer(&scopes) {
                    let scope = scopes.last();
                    let suppressed = scope.is_some_and(|s| s.suppressed);
                    let in_class = scope.is_some_and(|s| matches!(s.kind, ScopeKind::Class));
                    if !suppressed {
                        classify_statement(&stmt, in_class, scope.is_none(), &mut hits);
                    }
                }
                stmt.clear();
            }
            Tok::Punct(":") if paren == 0 => {
                let label = stmt.len() == 1
                    && stmt[0]
                        .ident()
                        .is_some_and(|w| matches!(w, "public" | "private" | "protected" | "default"))
                    || stmt.first().is_some_and(|t| t.is_word("case"));
                if label {
                    stmt.clear();
                } else {
                    stmt.push(tok);
                }
            }
            _ => stmt.push(tok),
        }
    }
    hits
}

/// Splits `toks` on top-level commas, tracking (), [], {} and <>.
fn split_top_level(toks: &[Tok]) -> Vec<&[Tok]> {
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, t) in toks.iter().enumerate() {
        match t {
            Tok::Punct("(" | "[" | "{" | "<") => depth += 1,
            Tok::Punct(")" | "]" | "}" | ">") => depth -= 1,
            Tok::Punct(",") if depth == 0 => {
                parts.push(&toks[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    parts.push(&toks[start..]);
    parts
}

fn render_type(toks: &[Tok]) -> String {
    let mut out = String::new();
    let mut prev_ident = false;
    for t in toks {
        match t {
            Tok::Ident(s) => {
                if prev_ident {
                    out.push(' ');
                }
                out.push_str(s);
                prev_ident = true;
            }
            Tok::Punct(p) => {
                out.push_str(p);
                prev_ident = false;
            }
            Tok::Number | Tok::Literal => prev_ident = false,
        }
    }
    out
}

fn strip_modifiers(toks: &[Tok]) -> Vec<Tok> {
    let mut out: Vec<Tok> = Vec::with_capacity(toks.len());
    let mut i = 0;
    while i < toks.len() {
        let t = &toks[i];
        if t.ident().is_some_and(|w| MODIFIERS.contains(&w)) {
            i += 1;
            continue;
        }
        // Leading generic parameter list of a Java generic method.
        if out.is_empty() && t.is("<") {
            let mut depth = 0;
            while i < toks.len() {
                if toks[i].is("<") {
                    depth += 1;
                } else if toks[i].is(">") {
                    depth -= 1;
                    if depth == 0 {
                        break;
                    }
                }
                i += 1;
            }
            i += 1;
            continue;
        }
        out.push(t.clone());
        i += 1;
    }
    out
}

fn valid_type(toks: &[Tok]) -> bool {
    let Some(first) = toks.first().and_then(Tok::ident) else {
        return false;
    };
    if STATEMENT_KEYWORDS.contains(&first) || TYPE_KEYWORDS.contains(&first) && toks.len() == 1 {
        return false;
    }
    let last_ok = matches!(
        toks.last(),
        Some(Tok::Ident(_) | Tok::Punct(">" | "*" | "&" | "]" | "..."))
    );
    let mut angle = 0i32;
    for (i, t) in toks.iter().enumerate() {
        match t {
            Tok::Punct("<") => angle += 1,
            Tok::Punct(">") => {
                angle -= 1;
                if angle < 0 {
                    return false;
                }
            }
            Tok::Punct("," | "?") if angle > 0 => {}
            Tok::Ident(_) | Tok::Punct("::" | "*" | "&" | "[" | "]" | ".") => {}
            Tok::Punct("...") if i + 1 == toks.len() => {}
            _ => return false,
        }
    }
    angle == 0
        && last_ok
        && !toks
            .windows(2)
            .any(|w| w[0].is(".") && !matches!(w[1], Tok::Ident(_) | Tok::Punct(".")))
}

/// Pulls (type, name) out of one declarator such as `const char *name[4]`.
fn declarator(toks: &[Tok]) -> Option<(Vec<Tok>, String)> {
    let mut end = toks.len();
    let mut dims = 0;
    // Trailing array dimensions.
    while end > 0 && toks[end - 1].is("]") {
        let open = toks[..end].iter().rposition(|t| t.is("["))?;
        end = open;
        dims += 1;
    }
    let name = toks.get(end.checked_sub(1)?)?.ident()?.to_string();
    if STATEMENT_KEYWORDS.contains(&name.as_str()) || MODIFIERS.contains(&name.as_str()) {
        return None;
    }
    let mut ty = strip_modifiers(&toks[..end - 1]);
    // `int v[3]` is reported as `int[]`, the same as Java's `int[] v`.
    for _ in 0..dims {
        ty.push(Tok::Punct("["));
        ty.push(Tok::Punct("]"));
    }
    if ty.is_empty() || !valid_type(&ty) {
        return None;
    }
    Some((ty, name))
}

fn push_hit(hits: &mut Vec<Hit>, context: IdentifierContext, name: &str, ty: &[Tok]) {
    hits.push(Hit {
        context,
        name: name.to_string(),
        type_hint: render_type(ty),
    });
}

fn first_top_level(toks: &[Tok], p: &str) -> Option<usize> {
    let mut depth = 0i32;
    for (i, t) in toks.iter().enumerate() {
        match t {
            Tok::Punct("(" | "[" | "{") => {
                if depth == 0 && t.is(p) {
                    return Some(i);
                }
                depth += 1;
            }
            Tok::Punct(")" | "]" | "}") => depth -= 1,
            _ if depth == 0 && t.is(p) => return Some(i),
            _ => {}
        }
    }
    None
}

struct FunctionHead {
    name: String,
    return_type: Vec<Tok>,
    params: Vec<(Vec<Tok>, String)>,
}

/// Recognizes `type name(params) ...` up to the end of `toks`.
fn function_head(toks: &[Tok]) -> Option<FunctionHead> {
    let open = first_top_level(toks, "(")?;
    if open == 0 || first_top_level(&toks[..open], "=").is_some() {
        return None;
    }
    let name = toks[open - 1].ident()?;
    if CONTROL.contains(&name) || STATEMENT_KEYWORDS.contains(&name) || name == "operator" {
        return None;
    }
    if toks
        .iter()
        .take(open)
        .any(|t| t.ident().is_some_and(|w| CONTROL.contains(&w)))
    {
        return None;
    }
    // Qualified names: Foo::bar or ~Foo.
    let mut head_end = open - 1;
    if head_end > 0 && toks[head_end - 1].is("~") {
        return None;
    }
    while head_end >= 2 && toks[head_end - 1].is("::") {
        head_end -= 2;
        // Foo<T>::bar
        if head_end > 0 && toks[head_end].is(">") {
            let lt = toks[..head_end].iter().rposition(|t| t.is("<"))?;
            head_end = lt.checked_sub(1)?;
        }
    }
    let mut prefix = &toks[..head_end];
    if let Some(t) = prefix.iter().position(|t| t.is_word("template")) {
        // template<...> prefix
        let mut depth = 0;
        let mut j = t + 1;
        while j < prefix.len() {
            if prefix[j].is("<") {
                depth += 1;
            } else if prefix[j].is(">") {
                depth -= 1;
                if depth == 0 {
                    break;
                }
            }
            j += 1;
        }
        prefix = &prefix[(j + 1).min(prefix.len())..];
    }
    let return_type = strip_modifiers(prefix);
    if !return_type.is_empty() && !valid_type(&return_type) {
        return None;
    }

    let mut depth = 0;
    let mut close = None;
    for (i, t) in toks.iter().enumerate().skip(open) {
        if t.is("(") {
            depth += 1;
        } else if t.is(")") {
            depth -= 1;
            if depth == 0 {
                close = Some(i);
                break;
            }
        }
    }
    let close = close?;
    let inner = &toks[open + 1..close];
    let mut params = Vec::new();
    if !inner.is_empty() {
        for part in split_top_level(inner) {
            if part.iter().any(|t| t.is("(")) {
                continue;
            }
            let part = match first_top_level(part, "=") {
                Some(eq) => &part[..eq],
                None => part,
            };
            if part.len() < 2 {
                continue;
            }
            if let Some(p) = declarator(part) {
                params.push(p);
            }
        }
    }
    Some(FunctionHead {
        name: name.to_string(),
        return_type,
        params,
    })
}

fn record_function(head: &FunctionHead, hits: &mut Vec<Hit>) {
    // Constructors and macro invocations have no return type.
    if !head.return_type.is_empty() {
        push_hit(hits, IdentifierContext::Function, &head.name, &head.return_type);
    }
    for (ty, name) in &head.params {
        push_hit(hits, IdentifierContext::Parameter, name, ty);
    }
}

fn class_head(toks: &[Tok]) -> Option<(usize, Option<String>)> {
    let kw = toks
        .iter()
        .position(|t| t.ident().is_some_and(|w| TYPE_KEYWORDS.contains(&w)))?;
    if first_top_level(&toks[..kw], "=").is_some() || toks[..kw].iter().any(|t| t.is("(")) {
        return None;
    }
    let mut rest = &toks[kw + 1..];
    if rest.first().is_some_and(|t| t.is_word("class") || t.is_word("struct")) {
        rest = &rest[1..];
    }
    let stop = rest
        .iter()
        .position(|t| t.is(":") || t.is("<") || t.is_word("extends") || t.is_word("implements") || t.is("("))
        .unwrap_or(rest.len());
    let name = rest[..stop].iter().rev().find_map(Tok::ident).map(str::to_string);
    Some((kw, name))
}

fn classify_block(stmt: &[Tok], in_class: bool, suppressed: bool, hits: &mut Vec<Hit>) -> Scope {
    let body = |suppressed| Scope {
        kind: ScopeKind::Body,
        suppressed,
        saved: None,
    };
    let Some(first) = stmt.first() else {
        return body(suppressed);
    };
    if first
        .ident()
        .is_some_and(|w| CONTROL.contains(&w) || matches!(w, "namespace" | "extern" | "static" | "package"))
        && !(first.is_word("static") && stmt.len() > 1)
        && !(first.is_word("extern") && stmt.len() > 2)
    {
        return body(suppressed);
    }
    if let Some((kw, name)) = class_head(stmt) {
        let is_enum = stmt[kw].is_word("enum");
        let test = name.as_deref().is_some_and(mentions_test);
        if let (Some(name), false, false, false) = (&name, is_enum, suppressed, test) {
            push_hit(hits, IdentifierContext::Class, name, &[]);
        }
        return Scope {
            kind: ScopeKind::Class,
            suppressed: suppressed || test,
            saved: None,
        };
    }
    if first_top_level(stmt, "=").is_some() {
        return Scope {
            kind: ScopeKind::Initializer,
            suppressed,
            saved: None,
        };
    }
    if stmt.iter().any(|t| t.is_word("new")) {
        // Anonymous class body; resume the enclosing statement afterwards.
        return Scope {
            kind: ScopeKind::Class,
            suppressed,
            saved: Some((Vec::new(), 0)),
        };
    }
    if let Some(head) = function_head(stmt) {
        let test = mentions_test(&head.name);
        if !suppressed && !test {
            record_function(&head, hits);
        }
        return body(suppressed || test);
    }
    if !in_class && stmt.len() >= 2 && declarator(stmt).is_some() {
        // Brace initialization: `Foo x{...};`
        return Scope {
            kind: ScopeKind::Initializer,
            suppressed,
            saved: None,
        };
    }
    body(suppressed)
}

fn classify_statement(stmt: &[Tok], in_class: bool, top_level: bool, hits: &mut Vec<Hit>) {
    let Some(first) = stmt.first() else { return };
    if first.ident().is_some_and(|w| STATEMENT_KEYWORDS.contains(&w)) || !matches!(first, Tok::Ident(_)) {
        return;
    }
    let eq = first_top_level(stmt, "=");
    let paren = first_top_level(stmt, "(");
    if let Some(p) = paren {
        if eq.is_none_or(|e| p < e) {
            // Prototype at file or class scope; calls and constructor-style
            // initialization elsewhere are ignored.
            if in_class || top_level {
                if let Some(head) = function_head(stmt) {
                    if !mentions_test(&head.name) {
                        record_function(&head, hits);
                    }
                }
            }
            return;
        }
    }
    let context = if in_class {
        IdentifierContext::Attribute
    } else {
        IdentifierContext::Declaration
    };
    let parts = split_top_level(stmt);
    let first_decl = {
        let p = parts[0];
        match first_top_level(p, "=") {
            Some(e) => &p[..e],
            None => p,
        }
    };
    let Some((ty, name)) = declarator(first_decl) else {
        return;
    };
    push_hit(hits, context, &name, &ty);
    let base: Vec<Tok> = ty.iter().filter(|t| !t.is("*") && !t.is("&")).cloned().collect();
    for part in &parts[1..] {
        let decl = match first_top_level(part, "=") {
            Some(e) => &part[..e],
            None => part,
        };
        let stars: Vec<Tok> = decl.iter().take_while(|t| t.is("*") || t.is("&")).cloned().collect();
        let rest = &decl[stars.len()..];
        let end = rest.iter().position(|t| t.is("[")).unwrap_or(rest.len());
        if end == 1 {
            if let Some(n) = rest[0].ident() {
                let mut t = base.clone();
                t.extend(stars);
                push_hit(hits, context, n, &t);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use IdentifierContext::*;

    fn hits(src: &str) -> Vec<(IdentifierContext, String, String)> {
        extract_from_source(src)
            .into_iter()
            .map(|h| (h.context, h.name, h.type_hint))
            .collect()
    }

    fn h(c: IdentifierContext, n: &str, t: &str) -> (IdentifierContext, String, String) {
        (c, n.to_string(), t.to_string())
    }

    #[test]
    fn function_with_parameter() {
        assert_eq!(
            hits("int getUserToken(int userId) { return userId; }"),
            vec![h(Function, "getUserToken", "int"), h(Parameter, "userId", "int")]
        );
        assert_eq!(
            hits("int getUserToken(int userId);"),
            vec![h(Function, "getUserToken", "int"), h(Parameter, "userId", "int")]
        );
    }

    #[test]
    fn java_class() {
        assert_eq!(hits("class Foo {}"), vec![h(Class, "Foo", "")]);
        let src = r#"
            package a.b;
            import java.util.List;
            @SuppressWarnings("unchecked")
            public class TokenStore extends Base implements Store {
                private final Map<String, Integer> tokenCounts = new HashMap<>();
                private int size;
                public TokenStore(int initialSize) { this.size = initialSize; }
                @Override
                public List<String> listTokens(final String prefix, int... limits) {
                    List<String> out = new ArrayList<>();
                    for (String t : tokenCounts.keySet()) { if (t.startsWith(prefix)) out.add(t); }
                    return out;
                }
                public void testHelper() { int hidden = 1; }
            }
        "#;
        assert_eq!(
            hits(src),
            vec![
                h(Class, "TokenStore", ""),
                h(Attribute, "tokenCounts", "Map<String,Integer>"),
                h(Attribute, "size", "int"),
                h(Parameter, "initialSize", "int"),
                h(Function, "listTokens", "List<String>"),
                h(Parameter, "prefix", "String"),
                h(Parameter, "limits", "int..."),
                h(Declaration, "out", "List<String>"),
            ]
        );
    }

    #[test]
    fn c_source() {
        let src = r#"
            #include <stdio.h>
            #define MAX(a, b) ((a) > (b) ? (a) : (b))
            static GList *tile_list_head = NULL;
            /* comment with int fake; */
            struct point { int x, y; char *label; };
            typedef struct { float w; } size_t2;
            GList *
            g_list_last (GList *list)
            {
              // int not_this;
              GList *tmp = list, *other;
              unsigned long max_tile_size = 0;
              const char *msg = "int not_a_decl = 3;";
              if (list) { list = list->next; }
              for (int i = 0; i < 3; i++) { tmp = tmp->next; }
              return list;
            }
        "#;
        assert_eq!(
            hits(src),
            vec![
                h(Declaration, "tile_list_head", "GList*"),
                h(Class, "point", ""),
                h(Attribute, "x", "int"),
                h(Attribute, "y", "int"),
                h(Attribute, "label", "char*"),
                h(Attribute, "w", "float"),
                h(Function, "g_list_last", "GList*"),
                h(Parameter, "list", "GList*"),
                h(Declaration, "tmp", "GList*"),
                h(Declaration, "other", "GList*"),
                h(Declaration, "max_tile_size", "unsigned long"),
                h(Declaration, "msg", "const char*"),
            ]
        );
    }

    #[test]
    fn cpp_source() {
        let src = r#"
            namespace render {
            template <typename T>
            class Buffer : public Base<T> {
            public:
                explicit Buffer(size_t capacity);
                virtual ~Buffer();
                bool isEmpty() const { return count == 0; }
                std::vector<T> items;
            private:
                int count = 0;
            };
            template <typename T>
            void Buffer<T>::pushBack(const T &value) {
                std::string label{"x"};
                items.push_back(value);
            }
            int values[] = {1, 2, 3};
            }
        "#;
        assert_eq!(
            hits(src),
            vec![
                h(Class, "Buffer", ""),
                h(Parameter, "capacity", "size_t"),
                h(Function, "isEmpty", "bool"),
                h(Attribute, "items", "std::vector<T>"),
                h(Attribute, "count", "int"),
                h(Function, "pushBack", "void"),
                h(Parameter, "value", "const T&"),
                h(Declaration, "label", "std::string"),
                h(Declaration, "values", "int[]"),
            ]
        );
    }

    #[test]
    fn test_named_scopes_are_skipped() {
        let src = r#"
            class WidgetTest { int hidden; void check() { int alsoHidden; } };
            void testParser(int hiddenParam) { int hiddenLocal; }
            void parse(int visible) { int local; }
        "#;
        assert_eq!(
            hits(src),
            vec![
                h(Function, "parse", "void"),
                h(Parameter, "visible", "int"),
                h(Declaration, "local", "int")
            ]
        );
    }

    #[test]
    fn anonymous_class_and_lambda() {
        let src = r#"
            class A {
                void run() {
                    Runnable r = new Runnable() { public void run() { int inner = 1; } };
                    Comparator<String> c = (x, y) -> { return 0; };
                }
            }
        "#;
        let got = hits(src);
        assert!(got.contains(&h(Declaration, "r", "Runnable")), "{got:?}");
        assert!(got.contains(&h(Declaration, "c", "Comparator<String>")), "{got:?}");
        assert!(got.contains(&h(Function, "run", "void")));
    }
}
