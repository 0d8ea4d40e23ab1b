#!/usr/bin/env python3
"""Smoke test for the qdg_py extension module.

Build the extension first:

    cargo build -p qdg-py          (or --release)

then run:

    python3 python/smoke_test.py
"""

import math
import shutil
import sys
import tempfile
from pathlib import Path

REPO = Path(__file__).resolve().parent.parent


def import_qdg_py():
    candidates = [
        REPO / "target" / profile / "libqdg_py.so"
        for profile in ("release", "debug")
    ]
    for so in candidates:
        if so.exists():
            staging = Path(tempfile.mkdtemp(prefix="qdg_py_"))
            shutil.copy(so, staging / "qdg_py.so")
            sys.path.insert(0, str(staging))
            import qdg_py  # noqa: PLC0415

            return qdg_py
    sys.exit("libqdg_py.so not found; run `cargo build -p qdg-py` first")


def main():
    qdg = import_qdg_py()
    checks = 0

    def ok(label, condition):
        nonlocal checks
        if not condition:
            sys.exit(f"FAIL: {label}")
        checks += 1
        print(f"PASS: {label}")

    # Mesh basics.
    sphere = qdg.TriMesh.icosphere(0.03, 3)
    ok("icosphere triangle count", sphere.triangle_count == 20 * 4**3)
    ok("digest is stable", sphere.digest == qdg.TriMesh.icosphere(0.03, 3).digest)

    lo, hi = sphere.aabb()
    ok("sphere bounds", all(abs(a + b) < 1e-9 for a, b in zip(lo, hi)))

    grown = sphere.augment((1.5, 1.0, 1.0))
    glo, ghi = grown.aabb()
    ok("augment scales x extent", abs((ghi[0] - glo[0]) - 1.5 * (hi[0] - lo[0])) < 1e-9)
    ok("identity augment keeps digest", sphere.augment((1.0, 1.0, 1.0)).digest == sphere.digest)

    hit = sphere.raycast((-0.2, 0.0, 0.0), (1.0, 0.0, 0.0), 1.0)
    ok("raycast hits the sphere", hit is not None and abs(hit[0] - 0.17) < 1e-6)

    # Sampled points sit on the faceted surface, within the facet sagitta of
    # the true sphere.
    samples = sphere.sample_surface(7, 100)
    ok("surface samples lie on the surface",
       all(abs(math.dist(p, (0, 0, 0)) - 0.03) < 2e-4 for p, _, _ in samples))
    ok("sampling is deterministic", samples == sphere.sample_surface(7, 100))

    decimated, hausdorff = sphere.decimate(80)
    ok("decimation hits the budget", decimated.triangle_count <= 80 and hausdorff < 0.02)

    # Grasp evaluation.
    gripper = qdg.GripperSpec()
    center_grasp = qdg.GraspGenome((0.0, 0.0, 0.0), (0.0, 0.0, 0.0, 1.0))
    nominal = qdg.evaluate(sphere, gripper, center_grasp)
    ok("centered sphere grasp succeeds", nominal["success"])
    ok("closing width is the diameter", abs(nominal["closing_width"] - 0.06) < 1e-6)

    labeled = qdg.evaluate(sphere, gripper, center_grasp, label=True, seed=0)
    ok("labeled grasp is robust", labeled["robust"] and labeled["quality"] >= 0.9)
    ok("descriptor is the TCP", qdg.descriptor(center_grasp, gripper) == (0.0, 0.0, 0.0))

    # Generation and transfer.
    archive = qdg.generate(sphere, seed=11, budget=3000)
    ok("generation finds successes", archive.success_count >= 50)
    ok("generation finds robust grasps", archive.robust_count >= 1)
    ok("generation reproduces", qdg.generate(sphere, seed=11, budget=3000).digest == archive.digest)

    transferred, report = qdg.bootstrap(sphere, archive, (1.0, 1.0, 1.0), seed=11)
    ok("identity transfer keeps every seed", report["transfer_rate"] == 1.0)
    ok("stop-after-bootstrap spends seed count only",
       report["evaluations_used"] == report["n_seeds"])

    mild, mild_report = qdg.bootstrap(sphere, archive, (1.1, 0.9, 1.0), seed=12)
    ok("mild augmentation transfers most grasps", mild_report["transfer_rate"] >= 0.5)
    ok("transferred archive holds successes", mild.success_count > 0)

    # Dataset output.
    with tempfile.TemporaryDirectory() as tmp:
        out = Path(tmp) / "sphere.qdg.jsonl"
        archive.save_dataset(str(out), "sphere", sphere)
        lines = out.read_text().strip().splitlines()
        ok("dataset has a header and one record", len(lines) == 2)
        ok("header names the format", '"format":"qdg.jsonl"' in lines[0].replace(" ", ""))

    print(f"\nsmoke test passed ({checks} checks)")


if __name__ == "__main__":
    main()
