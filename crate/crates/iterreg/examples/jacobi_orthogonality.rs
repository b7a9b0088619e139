//! The nu-method residuals are orthogonal polynomials: integrate r_t * r_s
//! against the shifted Jacobi weight sigma^{2nu - 1/2} (1 - sigma)^{-1/2}
//! and watch the off-diagonal inner products vanish.
//!
//! ```bash
//! cargo run --release --example jacobi_orthogonality
//! ```

use iterreg::filters::jacobi_orthogonality;

fn main() -> iterreg::Result<()> {
    let nu = 1.0;
    let order = 24;
    let max_index = 6;

    let mut diag = vec![0.0; max_index + 1];
    for (t, d) in diag.iter_mut().enumerate().skip(1) {
        *d = jacobi_orthogonality(nu, t, t, order)?;
    }

    println!("normalized inner products <r_t, r_s> / sqrt(<r_t,r_t><r_s,r_s>), nu = {nu}:");
    print!("{:>4}", "");
    for s in 1..=max_index {
        print!("{s:>12}");
    }
    println!();
    for t in 1..=max_index {
        print!("{t:>4}");
        for s in 1..=max_index {
            let value = if t == s {
                1.0
            } else {
                jacobi_orthogonality(nu, t, s, order)? / (diag[t] * diag[s]).sqrt()
            };
            print!("{value:>12.2e}");
        }
        println!();
    }
    println!("\ndiagonal norms <r_t, r_t>: {:?}", &diag[1..]);
    println!("the recursion parameters alpha_t, beta_t are exactly the three-term");
    println!("recurrence coefficients of this orthogonal family.");
    Ok(())
}
