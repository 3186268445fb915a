use pyo3::prelude::*;
use pyo3::types::PyDict;

fn with_module<F>(script: &std::ffi::CStr, check: F)
where
    F: for<'py> FnOnce(&Bound<'py, PyDict>),
{
    Python::initialize();
    Python::attach(|py| {
        let module = pyo3::wrap_pymodule!(stergm::stergm)(py);
        let globals = PyDict::new(py);
        globals.set_item("stergm", module).unwrap();
        py.run(script, Some(&globals), None).unwrap();
        check(&globals);
    });
}

#[test]
fn mixture_model_round_trip() {
    with_module(
        c"m = stergm.MixtureModel([0.2, 0.1], [0.9, 0.1])
h1 = m.hazard(1)
h200 = m.hazard(200)
eta = stergm.curved_eta(m, 3)",
        |g| {
            assert_eq!(g.get_item("h1").unwrap().unwrap().extract::<f64>().unwrap(), 0.19);
            let h200: f64 = g.get_item("h200").unwrap().unwrap().extract().unwrap();
            assert!((h200 - 0.1).abs() < 1e-4);
            let eta: Vec<f64> = g.get_item("eta").unwrap().unwrap().extract().unwrap();
            assert_eq!(eta.len(), 3);
            assert!((eta[0] - (0.81f64 / 0.19).ln()).abs() < 1e-12);
        },
    );
}

#[test]
fn invalid_inputs_raise_value_error() {
    with_module(
        c"errors = []
for build in (lambda: stergm.MixtureModel([1.5], [1.0]),
              lambda: stergm.Network(1),
              lambda: stergm.validate_config('{\"n\": 5}')):
    try:
        build()
    except ValueError as e:
        errors.append(str(e))",
        |g| {
            let errors: Vec<String> = g.get_item("errors").unwrap().unwrap().extract().unwrap();
            assert_eq!(errors.len(), 3, "{errors:?}");
        },
    );
}

#[test]
fn network_and_simulation_are_exposed() {
    with_module(
        c"import json
y = stergm.Network(3, [(0, 1)])
y.add_edge(1, 2)
degrees = [y.degree(i) for i in range(3)]
cfg = json.dumps({'n': 10, 'steps': 100, 'burn_in': 10, 'seed': 1,
                  'formation': {'terms': [{'kind': 'edges'}], 'theta': [-3.0]},
                  'dissolution': {'terms': [{'kind': 'edges'}], 'theta': [2.0]}})
a = stergm.simulate(cfg)['spells']
b = stergm.simulate(cfg)['spells']",
        |g| {
            let degrees: Vec<u32> = g.get_item("degrees").unwrap().unwrap().extract().unwrap();
            assert_eq!(degrees, vec![1, 2, 1]);
            let a = g.get_item("a").unwrap().unwrap();
            let b = g.get_item("b").unwrap().unwrap();
            assert!(a.eq(&b).unwrap());
            assert!(a.len().unwrap() == 1);
        },
    );
}
