use nalgebra::Vector2;

pub type Vec2 = Vector2<f64>;

/// The area form `ω(a, b) = det[a b]`.
#[inline]
pub fn det(a: Vec2, b: Vec2) -> f64 {
    a.x * b.y - a.y * b.x
}
