#!/usr/bin/env python3
"""Smoke test for the ualgebra Python extension module.

Builds the cdylib with cargo, exposes it on sys.path under the importable
name, and exercises the main entry points. Run from the repository root:

    python3 python/smoke_test.py
"""

import json
import shutil
import subprocess
import sys
import sysconfig
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent


def build_extension() -> Path:
    subprocess.run(
        ["cargo", "build", "-p", "ualgebra-py", "--release"],
        cwd=ROOT,
        check=True,
    )
    built = ROOT / "target" / "release" / "libualgebra.so"
    if not built.exists():  # e.g. macOS
        built = ROOT / "target" / "release" / "libualgebra.dylib"
    suffix = sysconfig.get_config_var("EXT_SUFFIX") or ".so"
    out_dir = ROOT / "target" / "pyext"
    out_dir.mkdir(parents=True, exist_ok=True)
    target = out_dir / f"ualgebra{suffix}"
    shutil.copy2(built, target)
    return out_dir


def main() -> int:
    sys.path.insert(0, str(build_extension()))
    import ualgebra

    names = ualgebra.corpus_names()
    assert "klein4" in names and len(names) == 11, names

    k4 = ualgebra.Algebra.corpus("klein4")
    assert k4.name == "klein4" and k4.size == 4

    congs = k4.congruences()
    assert len(congs) == 5, congs

    lat = json.loads(k4.lattice())
    assert lat["modular"] and not lat["distributive"]

    maltsev = json.loads(k4.find_term("maltsev"))
    assert maltsev["found"], maltsev

    tl = json.loads(k4.check_lemma("triangular", "cong"))
    assert not tl["holds"] and tl["exhaustive"], tl
    assert tl["counterexample"] is not None

    report = json.loads(k4.verify())
    assert report["violations"] == [], report["violations"]

    chain2 = ualgebra.Algebra.corpus("chain2")
    med = json.loads(chain2.find_term("majority"))
    assert med["found"], med
    mi = json.loads(chain2.check_majority_inequality("refl"))
    assert mi["holds"] and mi["exhaustive"], mi

    # round-trip through the JSON constructor
    clone = ualgebra.Algebra(k4.to_json())
    assert clone.size == 4 and len(clone.congruences()) == 5

    print("smoke test passed")
    return 0


if __name__ == "__main__":
    sys.exit(main())
