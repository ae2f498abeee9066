//! Dormand–Prince 5(4) steps for small autonomous systems.

/// One embedded step: returns the fifth-order solution and the difference
/// to the fourth-order one. Stage failures propagate.
pub fn dopri_step<const N: usize, E>(
    f: &mut impl FnMut(&[f64; N]) -> Result<[f64; N], E>,
    y: &[f64; N],
    k1: &[f64; N],
    h: f64,
) -> Result<([f64; N], [f64; N], [f64; N]), E> {
    const A: [[f64; 6]; 6] = [
        [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
        [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
        [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
        [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
        [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
    ];
    const E: [f64; 7] = [
        71.0 / 57600.0,
        0.0,
        -71.0 / 16695.0,
        71.0 / 1920.0,
        -17253.0 / 339200.0,
        22.0 / 525.0,
        -1.0 / 40.0,
    ];
    let mut k = [[0.0; N]; 7];
    k[0] = *k1;
    for s in 0..6 {
        let mut ys = *y;
        for (j, kj) in k.iter().enumerate().take(s + 1) {
            let a = A[s][j];
            if a != 0.0 {
                for i in 0..N {
                    ys[i] += h * a * kj[i];
                }
            }
        }
        k[s + 1] = f(&ys)?;
        if s == 5 {
            // first-same-as-last: ys is the fifth-order solution
            let mut err = [0.0; N];
            for (j, kj) in k.iter().enumerate() {
                for i in 0..N {
                    err[i] += h * E[j] * kj[i];
                }
            }
            return Ok((ys, err, k[6]));
        }
    }
    unreachable!()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_growth() {
        let mut f = |y: &[f64; 1]| -> Result<[f64; 1], ()> { Ok([y[0]]) };
        let mut y = [1.0];
        let h = 0.1;
        let mut k = f(&y).unwrap();
        for _ in 0..10 {
            let (yn, err, kn) = dopri_step(&mut f, &y, &k, h).unwrap();
            assert!(err[0].abs() < 1e-7);
            y = yn;
            k = kn;
        }
        assert!((y[0] - crate::math::exp(1.0)).abs() < 1e-7);
    }

    #[test]
    fn rotation_keeps_radius() {
        let mut f = |y: &[f64; 2]| -> Result<[f64; 2], ()> { Ok([-y[1], y[0]]) };
        let mut y = [1.0, 0.0];
        let mut k = f(&y).unwrap();
        for _ in 0..100 {
            let (yn, _, kn) = dopri_step(&mut f, &y, &k, 0.05).unwrap();
            y = yn;
            k = kn;
        }
        assert!((crate::math::hypot(y[0], y[1]) - 1.0).abs() < 1e-8);
        assert!((y[0] - crate::math::cos(5.0)).abs() < 1e-7);
    }
}
