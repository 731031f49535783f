//! Recomputes the mean raw gradient statistic of BPP layouts used to normalize ζ.

fn main() {
    let v = mimo_core::geometry::bpp_reference_statistic(100, 1000, 20_160_901).unwrap();
    println!("{v:.6}");
}
