use std::time::Instant;
#[test]
fn time_c8_instance() {
    use linlog_core::auxsys::*;
    use linlog_core::ratio::*;
    use linlog_core::linalg;
    let spec = SystemSpec {
        degrees: vec![3, 3, 3],
        family: BasisFamily::Matveev { d_flat: 2 },
        alphas: vec![rat2(5, 3), rat2(3, 2)],
        v_lattice: vec![vec![big(1), big(-3)]],
        s1: 4,
        t1: 4,
    };
    let t0 = Instant::now();
    let m = build_system(&spec).unwrap();
    println!("build: {:?} ({} rows x {} cols)", t0.elapsed(), m.rows.len(), m.cols.len());
    let t0 = Instant::now();
    let r = system_rank(&m);
    println!("rank {r}: {:?}", t0.elapsed());
    let t0 = Instant::now();
    let cleared = m.cleared();
    let maxbits = cleared.iter().flatten().map(|x| x.bits()).max().unwrap();
    println!("cleared: {:?} (max entry bits {maxbits})", t0.elapsed());
    let t0 = Instant::now();
    let k = linalg::integer_kernel(&cleared, m.cols.len());
    let kb = k.iter().flatten().map(|x| x.bits()).max().unwrap_or(0);
    println!("kernel ({} rows, max bits {kb}): {:?}", k.len(), t0.elapsed());
    let t0 = Instant::now();
    let sat = linalg::saturate(&k, m.cols.len());
    println!("saturate: {:?}", t0.elapsed());
    let mut red = sat.clone();
    let t0 = Instant::now();
    linlog_core::lll::lll_reduce(&mut red);
    println!("lll: {:?}", t0.elapsed());
}
