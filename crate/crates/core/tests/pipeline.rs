//! From Hamiltonians to ambient automorphisms across parameter sets.

use kr_core::extension::{build_lambda_family, extend_Ad, extend_generator, extend_torus, AmbientAut};
use kr_core::hamiltonian::truncated_flow;
use kr_core::poly::vars::X;
use kr_core::poly::{int, rat, Polynomial};
use kr_core::threefold::{LndSide, Threefold};
use kr_core::trunc_aut::RParams;
use kr_core::words::{lift_hamiltonian, AutWord, Generator};

fn p(s: &str) -> Polynomial {
    Polynomial::parse_std(s).unwrap()
}

fn threefolds() -> impl Iterator<Item = Threefold> {
    [(2, 2, 3), (2, 3, 5), (3, 2, 5), (3, 3, 4), (4, 2, 3)]
        .into_iter()
        .map(|(d, k, l)| Threefold::new(RParams::new(d, k, l).unwrap()))
}

#[test]
fn hamiltonian_words_lift_to_x() {
    for x in threefolds() {
        let order = x.params().order();
        // gamma r with gamma = 2: the flow stabilizes (r, x^d)
        let h = x.r().scale(&int(2));
        let word = lift_hamiltonian(order.get() - 1, &h, order).unwrap();
        assert_eq!(word.truncate(order), truncated_flow(&h, order.get() - 1, order).unwrap());
        let aut = x.lift_word(&word).unwrap();
        let back = aut.compose(&aut.invert()).unwrap();
        assert!(x.is_identity_on_x(&back.images), "{}", x.params());
        assert!(aut.fixes_origin());
    }
}

#[test]
fn family_extension_restricts_to_its_specialization() {
    let x = Threefold::new(RParams::new(2, 2, 3).unwrap());
    for gamma in ["1", "-2", "3*x"] {
        let family = build_lambda_family(&p(gamma), &x).unwrap();
        let aut = extend_generator(&family, &x).unwrap();
        assert_eq!(aut.apply(x.p()).unwrap(), *x.p());
        let at_zero = x.lift_word(&family.specialize(&int(0)).unwrap()).unwrap();
        assert!(aut.restricts_to(&at_zero, &x), "gamma = {gamma}");
        let text = serde_json::to_string(&aut).unwrap();
        let back: AmbientAut = serde_json::from_str(&text).unwrap();
        back.verify().unwrap();
    }
}

#[test]
fn ad_extensions_agree_with_exponentials() {
    for x in threefolds() {
        let d = x.params().d();
        let s = p("2*t - x");
        let word = AutWord::new([Generator::z_shear(s.shift(X, d)).unwrap()]);
        let ambient = extend_Ad(&word, &x).unwrap();
        let lnd = x.lnd_exponential(LndSide::ZSide, &s).unwrap();
        assert!(ambient.restricts_to(&lnd, &x), "{}", x.params());
        assert_eq!(ambient.apply(x.p()).unwrap(), *x.p());
    }
}

#[test]
fn torus_weights() {
    for x in threefolds() {
        let (k, l) = (x.params().k(), x.params().l());
        let q = rat(-2, 3);
        let aut = extend_torus(&q, &x).unwrap();
        let weight = num_traits::pow(q.clone(), (k * l) as usize);
        assert_eq!(aut.apply(x.p()).unwrap(), x.p().scale(&weight));
        let on_x = x.torus_action(&q).unwrap();
        assert!(aut.restricts_to(&on_x, &x));
        assert!(on_x.fixes_origin() && aut.fixes_origin());
    }
}
