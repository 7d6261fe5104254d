use pyo3::prelude::*;

#[test]
fn module_imports_and_computes() {
    use pydsair::pydsair;
    pyo3::append_to_inittab!(pydsair);
    Python::initialize();
    Python::attach(|py| {
        py.run(
            c"
import pydsair
race = pydsair.RaceParams(p_r=0.5)
m = pydsair.payoff_matrix(pydsair.Scenario('none'), race)
assert abs(m[0][1] - 0.6) < 1e-12 and abs(m[1][0] - 76.2) < 1e-12, m
res = pydsair.analyse(pydsair.Scenario('peer', commitments=True), race.with_risk(0.1))
assert res['labels'] == ['AS_in', 'AS_out', 'AU_in', 'AU_out', 'PS']
assert res['unsafe_frequency'] > 0.5
try:
    pydsair.Scenario('none', commitments=True)
except pydsair.ModelError:
    pass
else:
    raise AssertionError('accepted commitments without sanctions')
",
            None,
            None,
        )
        .unwrap();
    });
}
