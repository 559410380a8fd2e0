use num_bigint::BigInt;
use num_traits::Signed;
use paramodular::borcherds::{build_psi_division, build_psi_product, singular_table};
use paramodular::verify::section2_specs;

fn main() {
    for (name, spec) in section2_specs() {
        let t = spec.index().unwrap();
        let w = (t / 4).max(1);
        let psi = build_psi_product(&spec, w).unwrap();
        let psi2 = build_psi_division(&spec, w).unwrap();
        assert!(psi.agrees_with(&psi2, w).unwrap(), "{name} routes differ");
        let table = singular_table(&psi, t, 0).unwrap();
        let mut extras: Vec<(i64, BigInt)> = Vec::new();
        for (&(d, rbar), c) in &table.rows {
            if d == 0 && rbar != 0 {
                extras.push((rbar, c.clone()));
            }
        }
        println!("{name}: t={t} disc-0 nonzero-r classes: {extras:?}");
    }
    for (name, spec) in paramodular::verify::corpus() {
        let t = spec.index().unwrap();
        let v = spec.vanishing_order().unwrap();
        let w = (t / 4).max(1);
        let psi = build_psi_product(&spec, w).unwrap();
        let table = singular_table(&psi, t, v / 2).unwrap();
        let negs: Vec<_> = table
            .rows
            .iter()
            .filter(|((d, _), c)| c.is_negative() && *d == 0)
            .map(|((d, r), c)| (*d, *r, c.clone()))
            .collect();
        let strict_negs: Vec<_> = table
            .rows
            .iter()
            .filter(|((d, _), c)| c.is_negative() && *d < 0)
            .map(|((d, r), c)| (*d, *r, c.clone()))
            .collect();
        let zeros_nonneg: Vec<_> = table
            .rows
            .iter()
            .filter(|((d, r), _)| *d == 0 && *r != 0)
            .map(|((d, r), c)| (*d, *r, c.clone()))
            .collect();
        if !negs.is_empty() || !strict_negs.is_empty() || !zeros_nonneg.is_empty() {
            println!("corpus {name}: disc0 {zeros_nonneg:?} strict negs {strict_negs:?}");
        }
    }
    println!("done");
}
