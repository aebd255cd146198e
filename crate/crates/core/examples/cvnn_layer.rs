//! A CVNN layer stack: parameter layout, flat vectors and the param file.

use num_complex::Complex64;

use cvqgan::cvnn::{apply_layers, init_params, param_count, LayerParams, ParamVector};
use cvqgan::fock::FockState;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for (modes, depth) in [(1, 1), (2, 4), (3, 5), (3, 8)] {
        println!("{modes} modes x {depth} layers: {} parameters", param_count(modes, depth));
    }

    let params = init_params(3, 2, 42, 0.1);
    let layers = params.unpack();
    println!("layer 0 squeeze r: {:?}", layers[0].squeeze_r);
    println!("layer 0 displacement re: {:?}", layers[0].disp_re);
    assert_eq!(ParamVector::pack(&layers)?, params);

    let mut input = FockState::vacuum(3, 6)?;
    input.displace(0, Complex64::new(0.4, 0.0))?;
    let output = apply_layers(&input, &params)?;
    println!("<x> after the stack: {:?}", output.expectation_x_all()?);
    println!("norm kept: {:.6}", output.norm());

    // zero parameters are the identity
    let identity = ParamVector::pack(&[LayerParams::zeros(3)])?;
    println!("identity layer moves the state by {:.1e}", apply_layers(&input, &identity)?.max_abs_diff(&input));

    let json = params.to_json();
    assert_eq!(ParamVector::from_json(&json)?, params);
    println!("param file is {} bytes of JSON", json.len());
    Ok(())
}
