"""Smoke test for the Python extension.

Build it first:

    cargo build --release -p fock-summing-py --features extension-module

then run `python3 python/smoke_test.py` from the repository root.
"""

import math
import pathlib
import shutil
import sys
import tempfile

ROOT = pathlib.Path(__file__).resolve().parent.parent


def load():
    try:
        import fock_summing_py

        return fock_summing_py
    except ImportError:
        pass
    for profile in ("release", "debug"):
        lib = ROOT / "target" / profile / "libfock_summing_py.so"
        if lib.exists():
            tmp = pathlib.Path(tempfile.mkdtemp())
            shutil.copy(lib, tmp / "fock_summing_py.so")
            sys.path.insert(0, str(tmp))
            import fock_summing_py

            return fock_summing_py
    sys.exit("extension not built; see the module docstring")


def main():
    fs = load()
    grid = fs.GridSpec(step=0.05, radius=10.0, window=6)

    assert fs.target_exponent(3.0, 1.5) == ("LowR", 0.5)
    assert fs.target_exponent(1.5, 4.0)[0] == "SubTwo"

    atoms = [(0.0, 0.0, 1.0), (1.2, -0.4, 0.5), (-2.0, 1.5, 2.0)]
    mu = fs.Measure.from_atoms(atoms)
    v = fs.classify_embedding(2.0, 2.0, 1.0, fs.Weight("unit"), mu, grid)
    exact = math.sqrt(3.5 / math.pi)
    assert v.pi_low <= exact <= v.pi_high, (v, exact)
    assert v.classification == "summing_certified"
    assert v.csv_row(3).startswith("3,2,2,1,")

    rep = fs.classify_composition(1 + 0j, 0j, 2.0, 1.0, 1.0, grid)
    assert rep["verdict"] == "NOT_SUMMING", rep
    assert fs.classify_volterra([0.0, 1.0], 3.0, 3.0, 1.0, grid)["verdict"] == "SUMMING"

    lebesgue = fs.Measure("lebesgue")
    assert abs(lebesgue.mass_on_disk(0.3 + 0.2j, 1.0, grid) - math.pi) < 1e-3

    status, value = fs.order_bounded_check(fs.Measure("atom:0.5,0.5,1"), fs.Weight("unit"), grid=grid)
    assert status == "true" and abs(value - 1.0) < 1e-3

    assert abs(fs.diag_summing_bruteforce([2.5], 2.0, 2.0) - 2.5) < 1e-9

    try:
        fs.Weight("not-a-weight")
    except fs.FockError as e:
        assert "unknown weight" in str(e)
    else:
        raise AssertionError("expected FockError")

    code, out, _ = fs.run_cli(["classify-composition", "--a", "1", "--b", "0", "--p", "2", "--r", "1"])
    assert code == 0 and "NOT_SUMMING" in out

    print("python smoke test: ok")


if __name__ == "__main__":
    main()
