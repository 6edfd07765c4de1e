#!/usr/bin/env python3
"""Smoke test for the soficlab_py extension module.

Builds nothing itself: run `cargo build -p soficlab-py` first (or pass
--release and build in release mode). The script locates the cdylib,
imports it under the proper module name and exercises the main surface.
"""

import math
import shutil
import sys
import tempfile
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent


def load_module(profile: str):
    lib = ROOT / "target" / profile / "libsoficlab_py.so"
    if not lib.exists():
        sys.exit(f"{lib} not found; run `cargo build -p soficlab-py` first")
    tmp = Path(tempfile.mkdtemp(prefix="soficlab-py-"))
    shutil.copy(lib, tmp / "soficlab_py.so")
    sys.path.insert(0, str(tmp))
    import soficlab_py

    return soficlab_py


def main() -> None:
    profile = "release" if "--release" in sys.argv else "debug"
    sl = load_module(profile)
    checks = 0

    def check(name: str, ok: bool) -> None:
        nonlocal checks
        checks += 1
        print(f"{'PASS' if ok else 'FAIL'} {name}")
        if not ok:
            sys.exit(1)

    # group models and word evaluation
    z2 = sl.GroupModel.free_abelian(2)
    check("commutator dies in Z^2", z2.is_identity("a b a^-1 b^-1"))
    f2 = sl.GroupModel.free_group(2)
    check("commutator lives in F_2", not f2.is_identity("a b a^-1 b^-1"))
    check("plane ball size", z2.ball_size(2) == 13)
    check("free ball size", f2.ball_size(2) == 17)

    # exact quotients: perfect approximations
    fam = sl.Family.quotient(2, [6, 8, 10])
    check("torus sizes", fam.stage_sizes() == [36, 64, 100])
    check("torus good defects", fam.good_set_defects(2) == [0.0, 0.0, 0.0])
    check("torus local defects", fam.bs_defects(2) == [0.0, 0.0, 0.0])

    # spectral gap of the cycle family matches the closed form
    cycles = sl.Family.quotient(1, [16, 32])
    gaps = cycles.spectral_gaps(1)
    for n, gap in zip([16, 32], gaps):
        expect = 2.0 - 2.0 * math.cos(2.0 * math.pi / n)
        check(f"cycle gap n={n}", abs(gap - expect) <= 1e-6 * expect)
    ratio, boundary, size = cycles.cheeger(0)
    check("cycle sweep cut", boundary == 2 and size == 8)

    # mixed family: half the mass is line-like
    mixed = sl.Family.mixed(1, 2, [40, 60], 6, seed=7)
    check("mixed girths", all(g >= 6 for g in mixed.achieved_girths()))
    check("mixed mass", mixed.amenable_mass(3) == [0.5, 0.5])

    # Folner witnesses on cycles, none in expanders
    w = cycles.folner_witness(1, radius=1, eps=0.3)
    check("cycle folner witness", w is not None and w[2] < 0.3)

    # hyperfinite partition of a cycle into arcs
    parts, max_part, cut = cycles.hyperfinite_partition(0, 4)
    check("cycle partition", max_part <= 4 and cut == 4)

    # identity quasi-isometry witness
    mult, add, codensity = cycles.verify_qi(0, cycles, 0, list(range(16)))
    check("identity witness", (mult, add, codensity) == (1.0, 0.0, 0))

    # conditionally negative definite kernels
    line = [[abs(i - j) for j in range(8)] for i in range(8)]
    check("line distance is negative type", sl.verify_cnd(line, 1e-9))
    flat = [[0.0 if i == j else -1.0 for j in range(6)] for i in range(6)]
    check("flat negative kernel is not", not sl.verify_cnd(flat, 1e-9))

    # deterministic seed splitting
    check("seed split", sl.stage_seed(7, 0) == sl.stage_seed(7, 0))
    check("seed split varies", sl.stage_seed(7, 0) != sl.stage_seed(7, 1))

    print(f"ok: {checks} checks passed")


if __name__ == "__main__":
    main()
