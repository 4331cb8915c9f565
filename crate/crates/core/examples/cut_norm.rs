//! Exact cut norm of a step kernel next to the local-search lower bound.
//!
//! cargo run --example cut_norm

use gmixup::analysis::{cut_norm_exact, cut_norm_lower_bound, step_approx_error};
use gmixup::StepGraphon;
use nalgebra::DMatrix;

fn main() -> gmixup::Result<()> {
    let checkerboard = DMatrix::from_fn(8, 8, |i, j| if (i + j) % 2 == 0 { 1.0 } else { -1.0 });
    println!("checkerboard: {}", cut_norm_exact(&checkerboard)?);

    let a = StepGraphon::from_fn(12, |x, y| x * y)?;
    let b = StepGraphon::from_fn(12, |x, y| (x + y) / 2.0)?;
    let d = a.w() - b.w();
    println!("||xy - (x+y)/2||: exact {:.6}, lower bound {:.6}", cut_norm_exact(&d)?, cut_norm_lower_bound(&d, 20, 7)?);

    // coarser uniform steps approximate the fine graphon less well
    let fine = StepGraphon::from_fn(16, |x, y| (x * y).sqrt())?;
    for k in [1, 2, 4, 8, 16] {
        println!("step approximation with k = {k:>2}: {:.6}", step_approx_error(&fine, k)?);
    }
    Ok(())
}
