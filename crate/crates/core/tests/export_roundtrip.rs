use noetherkit::corpus::{load, CorpusName};
use noetherkit::expr::identity::{equal_numeric, CheckConfig};
use noetherkit::sysfile::{export_entry, parse_system};

#[test]
fn corpus_exports_parse_back_to_the_same_system() {
    for name in CorpusName::all() {
        let entry = load(name).unwrap();
        let text = export_entry(&entry);
        let doc = parse_system(&text).unwrap_or_else(|e| panic!("{name}: {e}\n{text}"));
        assert_eq!(doc.system.lagrangian(), entry.system.lagrangian(), "{name}");
        assert_eq!(doc.system.alphabet(), entry.system.alphabet(), "{name}");
        assert_eq!(doc.system.params(), entry.system.params(), "{name}");
        assert_eq!(doc.system.domain().coords, entry.system.domain().coords, "{name}");
        assert_eq!(doc.integrals.len(), entry.integrals.len());
        for n in &entry.integrals {
            assert_eq!(doc.integral(n.name()), Some(n.expr()), "{name} / {}", n.name());
        }
        for t in &entry.triples {
            assert_eq!(doc.triple(&t.name), Some(&t.triple), "{name} / {}", t.name);
        }
        // the binding survives too: Λ agrees numerically
        for i in 0..entry.system.dim() {
            let r = equal_numeric(&doc.system.accel()[i], &entry.system.accel()[i], entry.system.domain(), &CheckConfig::default()).unwrap();
            assert!(r.passed(), "{name}");
        }
        // and a second export is identical
        assert_eq!(export_entry(&entry), text);
    }
}
