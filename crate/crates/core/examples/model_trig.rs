//! Model-plane trigonometry in curvature -1, 0 and +1.

use std::f64::consts::PI;

use warpcone::model::{comparison_point, model_angle, model_chord, ModelTriangle, Side};

fn main() -> warpcone::error::Result<()> {
    for kappa in [-1.0, 0.0, 1.0] {
        let gamma = model_angle(kappa, 1.0, 1.0, 1.0)?;
        let chord = model_chord(kappa, 1.0, 1.0, PI / 2.0)?;
        println!("kappa = {kappa:+}: equilateral angle {gamma:.12}, right-angle chord {chord:.12}");
    }
    let tri = ModelTriangle::new(0.0, 2.0, 2.0, 2.0)?;
    let m_a = comparison_point(&tri, Side::A, 0.5)?;
    let m_b = comparison_point(&tri, Side::B, 0.5)?;
    println!("Euclidean midsegment of the (2, 2, 2) triangle: {:.12}", m_a.distance(&m_b));
    Ok(())
}
