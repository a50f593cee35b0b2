//! Principal square roots, `exp(iQx)`, block solves and `J₀`.

use lamtrans::linalg::{bessel_j0, block_solve, c, exp_iqx, principal_sqrt, CMatrix};

fn main() {
    let m = CMatrix::from_real_rows(&[vec![4.0, 1.0], vec![1.0, 3.0]]).unwrap();
    let q = principal_sqrt(&m).unwrap();
    let back = q.try_mul(&q).unwrap();
    println!("sqrt(M)^2 - M: {:.2e}", back.distance(&m));

    let forward = exp_iqx(&q, 0.7).unwrap();
    let backward = exp_iqx(&q, -0.7).unwrap();
    println!("exp(iQx) exp(-iQx) - E: {:.2e}", forward.try_mul(&backward).unwrap().distance(&CMatrix::identity(2)));

    let a = CMatrix::from_rows(&[vec![c(2.0, 1.0), c(0.5, 0.0)], vec![c(0.0, -1.0), c(3.0, 0.0)]]).unwrap();
    let b = CMatrix::identity(2);
    let x = block_solve(&a, &b).unwrap();
    println!("A X - B: {:.2e}", a.try_mul(&x).unwrap().distance(&b));

    for z in [0.0, 1.0, 2.404_825_557_695_773, 10.0, 30.0] {
        println!("J0({z}) = {:.15}", bessel_j0(z));
    }
}
