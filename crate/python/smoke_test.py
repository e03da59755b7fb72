"""Quick end-to-end check of the Python bindings."""

import json
import math
import pathlib

import hypermono_py as hm

ROOT = pathlib.Path(__file__).resolve().parent.parent


def close(a, b, tol):
    return abs(a - b) <= tol


def main():
    g = hm.MoebiusMap(2.0, 1.0, 0.0, 0.5)
    assert g.classify() == "hyperbolic"
    assert close(g.trace(), 2.5, 1e-12)
    assert (g @ g.inverse()).is_identity(1e-12)

    verdict, w = hm.classify_subgroup([hm.MoebiusMap.translation(1.0), hm.MoebiusMap.translation(math.sqrt(2))])
    assert verdict == "L0", verdict
    conj = hm.random_conjugate([hm.MoebiusMap.rotation(0.3), hm.MoebiusMap.rotation(1.1)], 7)
    assert hm.classify_subgroup(conj)[0] == "H3"

    f = hm.build_u1([(0.5 + 0j, 0.5), (-0.5 + 0j, 0.5)], 0.3j)
    assert f.variant == "u1" and f.model == "disc"
    assert abs(f(0.2 + 0.2j)) < 1.0
    assert close(f.curvature(0.1 - 0.4j), -1.0, 1e-4)
    assert close(f.cone_angle(0.5 + 0j), 0.5, 1e-2)
    mono = f.monodromy_generators()
    assert hm.classify_subgroup(mono)[0] == "H3"

    l0 = hm.build_l0([(0j, 1.0)], 1.0, 1.0, 0.5 + 0j)
    assert l0(0.1 + 0.3j).imag > 0
    assert l0.cusp_spread(0j) <= 0.5
    assert hm.classify_subgroup(l0.monodromy_generators())[0] == "L0"

    b = hm.blaschke([(0j, 2)])
    assert close(b.cone_angle(0j), 2.0, 1e-6)
    assert all(m.is_identity(1e-12) for m in b.monodromy_generators())

    audit = hm.residue_audit(["0", "0", "1"])
    assert audit["total"] == -2 and audit["pass"]
    for seed in range(20):
        assert hm.random_residue_audit(seed, 6)["total"] == -2

    chi, slack, ok = hm.heins(0, [("a", 0.5), ("b", 0.0), ("c", 0.0)])
    assert chi == 2 and ok and close(slack, -0.5, 1e-12)

    code, text = hm.run("heins", json.dumps({"genus": 2}))
    assert code == 0
    report = json.loads(text)
    try:
        import jsonschema
    except ImportError:
        jsonschema = None
    if jsonschema is not None:
        schemas = ROOT / "docs" / "schemas"
        jsonschema.validate(report, json.loads((schemas / "report.schema.json").read_text()))
        config = json.loads((schemas / "config.schema.json").read_text())
        check = {"$ref": "#/$defs/heins", "$defs": config["$defs"]}
        jsonschema.validate({"genus": 2}, check)
    print("smoke test passed")


if __name__ == "__main__":
    main()
