//! Stopping rules for the inner and outer iterations.

/// Inner rule: stop when `e_{n,2} < tolerance` (once available) or when the
/// iteration count reaches the cap.
///
/// `errors_this_outer` holds `e_{n,2}, e_{n,3}, …` for the current outer
/// iteration; `i` is the inner index just completed.
pub fn stopping_inner(errors_this_outer: &[f64], i: usize, cap: usize, tolerance: f64) -> bool {
    if i >= cap {
        return true;
    }
    match errors_this_outer.first() {
        Some(&e_n2) => e_n2 < tolerance,
        None => false,
    }
}

/// Outer rule: the combined error sequence of two consecutive outer
/// iterations stops the run when it contains three consecutive elements at
/// or below the window threshold.
pub fn stopping_outer(sequence: &[f64], window_threshold: f64) -> bool {
    sequence
        .windows(3)
        .any(|w| w.iter().all(|&e| e <= window_threshold))
}
