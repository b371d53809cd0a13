use pyo3::ffi::c_str;
use pyo3::prelude::*;

use deltader::deltader as deltader_module;

fn with_module<R>(f: impl FnOnce(Python<'_>) -> R) -> R {
    static INIT: std::sync::Once = std::sync::Once::new();
    INIT.call_once(|| {
        pyo3::append_to_inittab!(deltader_module);
        Python::initialize();
    });
    Python::attach(f)
}

#[test]
fn bindings_round_trip() {
    with_module(|py| {
        let code = c_str!(
            r#"
import deltader
thin = deltader.Algebra("thin")
assert thin.bracket("e1", "e2") == "e3"
fam = deltader.solve(deltader.Algebra("wittpos"), (1, 8), (1, 16))
assert fam.dim == 9
cmp = deltader.compare(thin, (1, 10))
assert cmp["dim_solved"] == 11 and cmp["expected_contained"]
assert deltader.check_map(thin, "id", (1, 6), (1, 10)) == []
assert deltader.parse_element("e2 + 1/2*e1") == "1/2*e1 + e2"
"#
        );
        py.run(code, None, None).unwrap();
    });
}

#[test]
fn errors_become_value_errors() {
    with_module(|py| {
        let code = c_str!(
            r#"
import deltader
try:
    deltader.Algebra("nope")
except ValueError:
    pass
else:
    raise AssertionError("expected ValueError")
"#
        );
        py.run(code, None, None).unwrap();
    });
}
