use nalgebra::{Matrix5, Vector3};
use num_complex::Complex64;
use proptest::prelude::*;

use willmore_lab::expr::{parse_rational, ExprError, RationalExpr};
use willmore_lab::gauss_map::{gauss_map_at, recover_h};
use willmore_lab::geom::{curvature_identity_residual, fundamental_forms, tracefree_density};
use willmore_lab::lorentz::{signature, square};
use willmore_lab::{MoebiusMap, Primitive, SurfaceSpec};

fn zoo() -> Vec<SurfaceSpec> {
    vec![
        SurfaceSpec::Plane,
        SurfaceSpec::sphere(1.0).unwrap(),
        SurfaceSpec::Enneper,
        SurfaceSpec::Catenoid,
    ]
}

fn point() -> impl Strategy<Value = [f64; 2]> {
    (-0.5..0.5f64, -0.5..0.5f64).prop_map(|(x, y)| [x, y])
}

fn far_center() -> impl Strategy<Value = Vector3<f64>> {
    (0.0..std::f64::consts::TAU, -1.0..1.0f64, 3.0..5.0f64).prop_map(|(phi, z, r)| {
        let s = (1.0 - z * z).sqrt();
        Vector3::new(s * phi.cos(), s * phi.sin(), z) * r
    })
}

fn unit_axis() -> impl Strategy<Value = Vector3<f64>> {
    (0.0..std::f64::consts::TAU, -1.0..1.0f64).prop_map(|(phi, z)| {
        let s = (1.0 - z * z).sqrt();
        Vector3::new(s * phi.cos(), s * phi.sin(), z)
    })
}

fn primitive() -> impl Strategy<Value = Primitive> {
    prop_oneof![
        (-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64)
            .prop_map(|(a, b, c)| Primitive::Translate(Vector3::new(a, b, c))),
        (0.3..3.0f64).prop_map(Primitive::Dilate),
        (unit_axis(), -3.0..3.0f64)
            .prop_map(|(u, t)| { MoebiusMap::rotate_axis_angle(u, t).stages()[0] }),
    ]
}

/// Rigid motions and dilations around one inversion whose center stays far
/// from the image of the sampled patch.
fn moebius() -> impl Strategy<Value = MoebiusMap> {
    (
        proptest::collection::vec(primitive(), 0..3),
        far_center(),
        proptest::collection::vec(primitive(), 0..3),
    )
        .prop_map(|(pre, a, post)| {
            let mut stages = pre;
            stages.push(Primitive::Invert(a));
            stages.extend(post);
            MoebiusMap::new(stages).unwrap()
        })
}

fn scaled_defect(a: &Matrix5<f64>, b: &Matrix5<f64>) -> f64 {
    (a - b).amax() / a.amax().max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gauss_equation_holds_everywhere(k in 0usize..4, p in point()) {
        let spec = &zoo()[k];
        let f = fundamental_forms(&spec.jet(p).unwrap()).unwrap();
        prop_assert!(curvature_identity_residual(&f).abs() < 1e-10);
    }

    #[test]
    fn tracefree_density_is_moebius_invariant(k in 0usize..4, p in point(), m in moebius()) {
        let spec = zoo()[k].clone();
        let before = tracefree_density(&fundamental_forms(&spec.jet(p).unwrap()).unwrap());
        let image = SurfaceSpec::transformed(m, spec).unwrap();
        let after = tracefree_density(&fundamental_forms(&image.jet(p).unwrap()).unwrap());
        prop_assert!((before - after).abs() <= 1e-8 * (1.0 + before), "{before} vs {after}");
    }

    #[test]
    fn lorentz_representation_is_a_homomorphism(m in moebius(), n in moebius()) {
        let eps = signature();
        for l in [m.lorentz(), n.lorentz()] {
            let g = l.matrix().transpose() * eps * l.matrix();
            prop_assert!(scaled_defect(&g, &eps) < 1e-10);
        }
        let composed = m.after(&n).lorentz();
        let product = m.lorentz().matrix() * n.lorentz().matrix();
        prop_assert!(scaled_defect(composed.matrix(), &product) < 1e-10);
    }

    #[test]
    fn inversions_undo_each_other(a in far_center(), x in (-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64)) {
        // (x − a)/|x − a|² is undone by y ↦ a + y/|y|²
        let there_and_back = MoebiusMap::new(vec![
            Primitive::Invert(a),
            Primitive::Invert(Vector3::zeros()),
            Primitive::Translate(a),
        ]).unwrap();
        let x = Vector3::new(x.0, x.1, x.2);
        prop_assert!((there_and_back.apply_point(&x).unwrap() - x).norm() < 1e-12);
        let l = there_and_back.lorentz();
        prop_assert!(scaled_defect(l.matrix(), &Matrix5::identity()) < 1e-12);
        let origin = MoebiusMap::invert(Vector3::zeros()).lorentz();
        prop_assert!(scaled_defect(&(origin.matrix() * origin.matrix()), &Matrix5::identity()) < 1e-15);
    }

    #[test]
    fn gauss_map_lies_in_de_sitter_space(k in 0usize..4, p in point(), m in moebius()) {
        let spec = SurfaceSpec::transformed(m, zoo()[k].clone()).unwrap();
        let (f, y) = gauss_map_at(&spec, p).unwrap();
        prop_assert!((square(&y.y) - 1.0).abs() < 1e-10);
        prop_assert!((recover_h(&y.y) - f.h).abs() <= 1e-10 * (1.0 + f.h.abs()));
    }

    #[test]
    fn gauss_map_is_equivariant(k in 0usize..4, p in point(), m in moebius()) {
        let spec = zoo()[k].clone();
        let (_, y) = gauss_map_at(&spec, p).unwrap();
        let image = SurfaceSpec::transformed(m.clone(), spec).unwrap();
        let (_, y_image) = gauss_map_at(&image, p).unwrap();
        let pushed = m.lorentz().act_on_y(&y.y);
        prop_assert!((y_image.y - pushed).norm() <= 1e-8 * (1.0 + pushed.norm()));
    }

    #[test]
    fn dilation_scales_curvature(k in 0usize..4, p in point(), s in 0.2..5.0f64) {
        let spec = zoo()[k].clone();
        let f = fundamental_forms(&spec.jet(p).unwrap()).unwrap();
        let g = fundamental_forms(&SurfaceSpec::transformed(MoebiusMap::dilate(s).unwrap(), spec).unwrap().jet(p).unwrap()).unwrap();
        prop_assert!((g.lambda - f.lambda - s.ln()).abs() < 1e-12);
        prop_assert!((g.h * s - f.h).abs() < 1e-12);
        prop_assert!((g.k * s * s - f.k).abs() < 1e-10);
    }

    #[test]
    fn printed_rationals_parse_back(e in rational()) {
        let parsed = parse_rational(&e.to_string());
        if e.check_denominators().is_err() {
            let rejected = matches!(parsed, Err(ExprError::DivisionByZeroExpr { .. }));
            prop_assert!(rejected);
            return Ok(());
        }
        let again = parsed.unwrap();
        for z in [Complex64::new(0.3, 0.7), Complex64::new(-1.1, 0.2), Complex64::new(2.5, -1.5)] {
            let (a, b) = (e.eval(z), again.eval(z));
            if a.is_finite() {
                prop_assert!((a - b).norm() <= 1e-12 * (1.0 + a.norm()), "{e}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn surface_specs_round_trip(k in 0usize..4, m in moebius(), amp in 0.01..0.1f64) {
        let spec = SurfaceSpec::perturbed(amp, SurfaceSpec::transformed(m, zoo()[k].clone()).unwrap()).unwrap();
        let again: SurfaceSpec = spec.to_string().parse().unwrap();
        let p = [0.1, -0.2];
        prop_assert!((spec.jet(p).unwrap().phi - again.jet(p).unwrap().phi).norm() < 1e-9);
    }
}

fn rational() -> impl Strategy<Value = RationalExpr> {
    let leaf = prop_oneof![
        Just(RationalExpr::Z),
        (-5.0..5.0f64, -2.0..2.0f64)
            .prop_map(|(re, im)| RationalExpr::Const(Complex64::new(re, im))),
    ];
    leaf.prop_recursive(4, 32, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|a| RationalExpr::Neg(Box::new(a))),
            (inner.clone(), inner.clone())
                .prop_map(|(a, b)| RationalExpr::Add(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone())
                .prop_map(|(a, b)| RationalExpr::Sub(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone())
                .prop_map(|(a, b)| RationalExpr::Mul(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone())
                .prop_map(|(a, b)| RationalExpr::Div(Box::new(a), Box::new(b))),
            (inner, -3i32..4).prop_map(|(a, n)| RationalExpr::Pow(Box::new(a), n)),
        ]
    })
}

#[test]
fn fixed_expression_corpus_round_trips() {
    let corpus = [
        "z",
        "1",
        "-z",
        "z^2",
        "z^-1",
        "(1+z)^-2",
        "2i*z",
        "1.5e1 + i",
        "z/(1-z)",
        "z^2/(1+z)",
        "(z-1)*(z+1)",
        "1/(z^2+1)",
        "3*z^3-2*z+7",
        "(1-z^2)/2",
        "i*(1+z^2)/2",
        "z^10",
        "(z+i)/(z-i)",
        "1/z/z",
        "((z))",
        "-(-z)",
        "z*z*z",
        "2.5*z^-3",
        "1e-3*z",
        "(2+3i)*z",
        "z-(1-z)",
        "1/(1/(1/z))",
        "(z^2-1)^2",
        "z^4/(z^4+1)",
        "7",
        "-2.25",
        "i",
        "-i*z",
        "z^0",
        "(z+1)^0",
        "(3-i)/(z^2-4)",
        "z/(z+1)/(z+2)",
        "(z+0.5)^3",
        "1-z+z^2-z^3",
        "(1+i)^2*z",
        "-(z^2)",
        "z^2-z^-2",
        "(z^3+1)/(z^3-1)",
        "4/(1+z)^2",
        "z*(1+z)*(1+2*z)",
        "(i*z)^2",
        "1e2/(z+1e2)",
        "(0.25*z+0.75)^-1",
        "z^5/5",
        "(z^2+2*z+2)/(z-3)",
        "-1/(z*z)",
    ];
    assert_eq!(corpus.len(), 50);
    for text in corpus {
        let e = parse_rational(text).unwrap();
        let again = parse_rational(&e.to_string()).unwrap();
        for z in [Complex64::new(0.3, 0.7), Complex64::new(-1.7, 0.4)] {
            let (a, b) = (e.eval(z), again.eval(z));
            assert!(
                (a - b).norm() <= 1e-12 * (1.0 + a.norm()),
                "{text}: {a} vs {b}"
            );
        }
    }
}
