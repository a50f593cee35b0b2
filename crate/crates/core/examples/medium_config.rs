//! A medium and its coupling from JSON, with the invertibility certificate.

use lamtrans::medium::{build_medium, check_invertibility, serialize_medium, MediumConfig};

const CONFIG: &str = r#"{
  "r": 2,
  "interfaces": [0.0, 1.0],
  "layers": [
    { "A_sq": [[1.0, 0.0], [0.0, 1.0]], "Gamma_sq": [[0.0, 0.0], [0.0, 0.0]] },
    { "A_sq": [[2.0, 0.3], [0.3, 1.5]], "Gamma_sq": [[0.2, 0.0], [0.0, 0.1]] }
  ],
  "coupling": {
    "boundary": { "beta": [[1.0, 0.0], [0.0, 1.0]] },
    "interfaces": [{
      "conditions": [
        { "left": { "beta": [[1.0, 0.0], [0.0, 1.0]] }, "right": { "beta": [[-1.0, 0.0], [0.0, -1.0]] } },
        { "left": { "alpha": [[1.0, 0.0], [0.0, 1.0]] }, "right": { "alpha": [[-2.0, -0.3], [-0.3, -1.5]] } }
      ]
    }]
  }
}"#;

fn main() {
    let config: MediumConfig = serde_json::from_str(CONFIG).unwrap();
    let (medium, coupling) = build_medium(&config).unwrap();
    println!("{} layers, interfaces {:?}", medium.layer_count(), medium.interfaces());

    let lambdas: Vec<f64> = (1..=100).map(|i| 0.1 * i as f64).collect();
    let cert = check_invertibility(&coupling, &medium, &lambdas).unwrap();
    for r in &cert.records {
        println!("M_{}{}: min |det| {:.3e} at lambda = {:.2}", r.m, r.k, r.min_det, r.at_lambda);
    }

    let again = serialize_medium(&medium, &coupling);
    println!("{}", serde_json::to_string(&again).unwrap());
}
