"""Smoke test for the qtlattice_py extension.

Uses an installed module if present, otherwise loads the shared library
built by `cargo build -p qtlattice-py --release --features extension-module`.
"""

import importlib.machinery
import importlib.util
import json
import pathlib
import sys


def load():
    try:
        import qtlattice_py

        return qtlattice_py
    except ImportError:
        pass
    root = pathlib.Path(__file__).resolve().parent.parent
    for profile in ("release", "debug"):
        lib = root / "target" / profile / "libqtlattice_py.so"
        if lib.exists():
            loader = importlib.machinery.ExtensionFileLoader("qtlattice_py", str(lib))
            modspec = importlib.util.spec_from_loader("qtlattice_py", loader)
            mod = importlib.util.module_from_spec(modspec)
            loader.exec_module(mod)
            return mod
    sys.exit("qtlattice_py not found; build it first")


def main():
    q = load()

    want = {"2": "1", "1,1": "1+q"}
    for route in ("lattice", "dual", "oracle"):
        assert q.modified_h([2], 2, route) == want, route
    assert q.modified_h([1, 1], 2) == {"2": "t", "1,1": "1+t"}
    assert q.modified_hl([1, 1], 2) == {"2": "t", "1,1": "1+t"}
    assert q.kostka_qt([1, 1]) == {"2": "t", "1,1": "1"}

    doc = json.loads(q.modified_h_json([2, 1]))
    assert doc["lambda"] == "2,1" and "2,1" in doc["coeffs"]

    ex = q.phi_poly([1, 3, 4, 5], [2, 3, 5, 5], "positive")
    assert ex == q.phi_poly([1, 3, 4, 5], [2, 3, 5, 5], "series")
    assert ex.endswith("t^8*z^3"), ex

    assert q.duality_check([2, 1])
    assert q.cauchy_check("PQ", 1, 1, 3)
    assert q.w_polynomial([1], 1) == "x1+z1"

    try:
        q.modified_h([1, 2])
    except ValueError:
        pass
    else:
        raise AssertionError("expected ValueError")

    print("python smoke test: ok")


if __name__ == "__main__":
    main()
