use condbound::harness::{generate, Instance, InstanceFamily, Mode, Problem};
use condbound::heights::check_inverse_height;
use condbound::numcore::IntMatrix;
use condbound::Error;

fn matrices(n: usize, range: i64, mode: Mode, count: Option<u64>) -> impl Iterator<Item = IntMatrix> {
    let mut fam = InstanceFamily::new(Problem::Linsys, mode).n(n).range(range).seed(5);
    if let Some(c) = count {
        fam = fam.count(c);
    }
    generate(&fam).unwrap().map(|i| match i {
        Instance::Matrix(a) => a,
        _ => unreachable!(),
    })
}

/// Returns (checked, first matrix where only the n·H(A)ⁿ form fails).
fn inverse_heights(it: impl Iterator<Item = IntMatrix>) -> (usize, Option<IntMatrix>) {
    let mut checked = 0;
    let mut linear_fails = None;
    for a in it {
        match check_inverse_height(&a) {
            Ok(c) => {
                checked += 1;
                assert!(
                    c.factorial_form_holds,
                    "H(A^-1) = {} exceeds n!·H(A)^n for {a}",
                    c.inverse_height
                );
                if !c.linear_form_holds && linear_fails.is_none() {
                    linear_fails = Some(a);
                }
            }
            Err(Error::Degenerate(_)) => {}
            Err(e) => panic!("{a}: {e}"),
        }
    }
    (checked, linear_fails)
}

#[test]
fn inverse_height_factorial_form_2x2_exhaustive() {
    let (checked, linear) = inverse_heights(matrices(2, 2, Mode::Exhaustive, None));
    assert!(checked > 0);
    // for n = 2 the two forms coincide
    assert!(linear.is_none());
}

#[test]
fn inverse_height_factorial_form_3x3() {
    let (a, la) = inverse_heights(matrices(3, 1, Mode::Exhaustive, None));
    let (b, lb) = inverse_heights(matrices(3, 2, Mode::Random, Some(20_000)));
    assert!(a > 0 && b > 0);
    // the n·H(A)ⁿ form is too strong at n = 3
    let witness = la.or(lb).expect("a 3x3 matrix where H(A^-1) > 3·H(A)^3");
    let c = check_inverse_height(&witness).unwrap();
    assert!(c.inverse_height > 3 * c.matrix_height.pow(3));
}
