//! Adam on an ill-conditioned quadratic.

use cvqgan::engine::{Adam, AdamState};

fn main() {
    let scales = [1.0, 10.0, 100.0];
    let loss = |p: &[f64]| p.iter().zip(&scales).map(|(x, s)| 0.5 * s * (x - 1.0).powi(2)).sum::<f64>();
    let adam = Adam {
        lr: 0.05,
        beta1: 0.9,
        beta2: 0.999,
    };
    let mut params = vec![0.0; 3];
    let mut state = AdamState::new(3);
    for step in 0..=400 {
        if step % 100 == 0 {
            println!("step {step:3}: loss {:.3e}, params {:.4?}", loss(&params), params);
        }
        let grad: Vec<f64> = params.iter().zip(&scales).map(|(x, s)| s * (x - 1.0)).collect();
        adam.step(&mut state, &mut params, &grad);
    }
}
