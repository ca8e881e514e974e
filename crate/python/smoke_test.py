"""Smoke test for the pyidpos extension module.

Build and install first, e.g.

    maturin build -m crates/python/Cargo.toml --release
    pip install target/wheels/idpos_python-*.whl

then run `python python/smoke_test.py` from the repository root.
"""

import os
import sys
import tempfile

import pyidpos

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
CORPUS = os.path.join(ROOT, "crates", "core", "tests", "data", "annotated_sample.tsv")


def check(cond, what):
    print(("ok   " if cond else "FAIL ") + what)
    return cond


def main():
    results = []
    results.append(check(pyidpos.split("getUserId") == ["get", "User", "Id"], "split camelCase"))
    results.append(check(pyidpos.split("max_tile_size") == ["max", "tile", "size"], "split snake_case"))
    results.append(check(pyidpos.pattern_of(["V", "NM", "N"]) == "V NM N", "pattern_of"))
    results.append(check(pyidpos.map_penn("VBG", "FUNCTION") == ("VBG", "V"), "VBG in a function"))
    results.append(check(pyidpos.map_penn("VBN", "PARAMETER", conjugated=False) == ("V", "NM"), "VBN normalized"))
    results.append(check([pyidpos.normalized_position(i, 3) for i in (1, 2, 3)] == [1, 2, 3], "positions"))

    m = pyidpos.word_metrics(["N", "N", "V", "V"], ["N", "N", "V", "N"])
    results.append(check(abs(m["accuracy"] - 0.75) < 1e-12, "accuracy 0.75"))
    results.append(check(abs(m["weighted_recall"] - m["accuracy"]) < 1e-12, "weighted recall equals accuracy"))
    results.append(check(pyidpos.identifier_accuracy([["N"], ["V", "N"]], [["N"], ["N", "N"]]) == 0.5, "identifier accuracy"))

    tags = pyidpos.stand_in_tags("getUserId", "FUNCTION", "int")
    results.append(check(sorted(tags) == ["posse", "stanford", "swum"] and all(len(v) == 3 for v in tags.values()), "stand-in taggers"))

    try:
        pyidpos.split("")
        results.append(check(False, "empty identifier raises"))
    except ValueError:
        results.append(check(True, "empty identifier raises"))

    model = pyidpos.Model.train(CORPUS, config="RFCP", seed=7, n_estimators=25)
    results.append(check(model.n_trees == 25, "trained 25 trees"))
    results.append(check(model.features == ["swum", "posse", "stanford", "normalized_position", "context"], "default feature subset"))
    out = model.tag("getUserId", "FUNCTION", "int")
    results.append(check(len(out) == 3 and all(t in model.classes for t in out), "tag returns one known tag per word"))

    with tempfile.TemporaryDirectory() as d:
        path = os.path.join(d, "model.json")
        model.save(path)
        again = pyidpos.Model.load(path)
        results.append(check(again.tag("maxTileSize", "ATTRIBUTE", "int") == model.tag("maxTileSize", "ATTRIBUTE", "int"), "save/load round trip"))

    cv = pyidpos.crossval(CORPUS, config="DTCP", k=5, seed=1)
    results.append(check(0.0 <= cv["accuracy"] <= 1.0 and "identifier_accuracy" in cv, "crossval"))

    failed = results.count(False)
    print(f"{len(results) - failed}/{len(results)} checks passed")
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
