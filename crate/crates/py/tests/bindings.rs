use pyo3::prelude::*;

use hypermono_py::hypermono_py;

fn with_module(code: &str) {
    pyo3::append_to_inittab!(hypermono_py);
    Python::with_gil(|py| {
        let m = py.import_bound("hypermono_py").unwrap();
        let locals = pyo3::types::PyDict::new_bound(py);
        locals.set_item("hm", m).unwrap();
        py.run_bound(code, None, Some(&locals)).unwrap();
    });
}

#[test]
fn python_surface() {
    with_module(
        r#"
import math
g = hm.MoebiusMap(2.0, 0.0, 0.0, 0.5)
assert g.classify() == "hyperbolic"
assert hm.classify_subgroup([g, hm.MoebiusMap(0.0, 1.0, -1.0, 0.0)])[0] == "H2prime"
f = hm.build_u1([(0j, 0.5)], 0.5 + 0j)
assert abs(f(0.3j)) < 1
assert abs(f.cone_angle(0j) - 0.5) < 1e-2
assert hm.residue_audit(["1", "0", "1"], ["0", "1"])["total"] == -2
code, _ = hm.run("heins", '{"genus": 0}')
assert code == 0
try:
    hm.blaschke([(2 + 0j, 1)])
    raise AssertionError("expected ValueError")
except ValueError:
    pass
"#,
    );
}
