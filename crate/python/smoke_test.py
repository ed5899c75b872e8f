"""Smoke test for the papertorus_py extension.

Build and install first:  maturin develop -m crates/py/Cargo.toml --release
"""

import os
import sys

import papertorus_py as pt

FIXTURE = os.path.join(os.path.dirname(__file__), "..", "crates", "core", "fixtures", "puptent.pt")


def main():
    t = pt.Torus.read(FIXTURE)
    print(t)
    assert t.vertex_count == 8 and len(t.faces) == 16
    assert float(t.flatness()) < 1e-32
    assert t.is_embedded()

    h = t.hull()
    assert h["face_number"] == 6 and len(h["facet_list"]) == 12 and all(h["on_hull"])

    gram = [float(g) for g in t.develop()["gram"]]
    assert abs(gram[0] - 11.114883528) < 1e-8

    bundle = t.certify_embedding()
    assert t.verify(bundle)["certificates"] == 96
    bad = bundle.replace(" L=(", " L=(1", 1)
    try:
        t.verify(bad)
    except ValueError:
        pass
    else:
        raise AssertionError("tampered bundle accepted")

    assert t.certify_ift()["holds"]

    r = pt.prove7()
    assert r["total_patterns"] == 15504 and len(r["survivors"]) == 6

    n = pt.newton()
    assert n["iterations"] <= 20
    assert n["z"][0].startswith("0.98050571585977935561653820085693")

    j = pt.jacobian()
    assert abs(float(j["matrix"][0][0]) + 0.9134612) < 1e-6

    s = pt.search("chains = 1\nmax_iterations = 200\n", seed=3)
    assert s["torus"].vertex_count == 8

    assert pt.Torus.parse(t.to_text()).to_text() == t.to_text()
    print("smoke test ok")
    return 0


if __name__ == "__main__":
    sys.exit(main())
