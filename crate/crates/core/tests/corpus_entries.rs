use noetherkit::corpus::{isochrony_n3_strongness_gap, load, CorpusName};
use noetherkit::expr::identity::{equal_numeric, CheckConfig};
use noetherkit::expr::{diff, Var};
use noetherkit::noether::{verify_triple, Form};

fn all_entries() -> Vec<noetherkit::corpus::CorpusEntry> {
    CorpusName::all().into_iter().map(|n| load(n).unwrap()).collect()
}

#[test]
fn every_triple_verifies_in_its_claimed_form_and_gives_its_integral() {
    let cfg = CheckConfig::default();
    for entry in all_entries() {
        for nt in &entry.triples {
            let n = entry.integral(&nt.integral).unwrap();
            let r = verify_triple(&entry.system, &nt.triple, nt.triple.form, Some(n.expr()), &cfg).unwrap();
            assert!(r.passed(), "{} / {}: {:?}", entry.name, nt.name, r);
        }
    }
}

#[test]
fn strong_triples_also_pass_on_flow() {
    let cfg = CheckConfig::default();
    for entry in all_entries() {
        for nt in entry.triples.iter().filter(|t| t.triple.form == Form::Strong) {
            let r = verify_triple(&entry.system, &nt.triple, Form::OnFlow, None, &cfg).unwrap();
            assert!(r.passed(), "{} / {}", entry.name, nt.name);
        }
    }
}

#[test]
fn n3_onflow_triple_is_not_strong() {
    let cfg = CheckConfig::default();
    for entry in all_entries().into_iter().filter(|e| matches!(e.name, CorpusName::Isochrony { .. })) {
        let sys = &entry.system;
        let tr = &entry.triple("n3_onflow").unwrap().triple;
        let strong = verify_triple(sys, tr, Form::Strong, None, &cfg).unwrap();
        assert!(!strong.passed(), "{}", entry.name);
        // ξ − (τ q̇ − g⁻¹ ∂_q̇ N₃) with τ = 0
        let n3 = entry.integral("n3").unwrap().expr();
        let grad: Vec<_> = (0..2).map(|i| diff(n3, Var::Vel(i))).collect();
        let w = sys.invert_g_apply(&grad).unwrap().solution;
        let gap = isochrony_n3_strongness_gap(sys);
        for i in 0..2 {
            let computed = &tr.xi[i] + &w[i];
            assert!(equal_numeric(&computed, &gap[i], sys.domain(), &cfg).unwrap().passed(), "{} component {i}", entry.name);
        }
        // and the gap is not identically zero
        assert!(!equal_numeric(&gap[1], &noetherkit::expr::Expr::zero(), sys.domain(), &cfg).unwrap().passed());
    }
}
