//! Two planning exercises on synthetic cities: adding a hospital next to
//! one with an oversized perimeter, and merging two adjacent schools.
//!
//! cargo run --release --example case_studies

use urbanet::report::{render_comparison, summary_line};
use urbanet::scenarios::{case_study_one, case_study_two, CaseStudyOne};
use urbanet::{track, what_if, PoiEdit};

fn main() -> urbanet::Result<()> {
    let one = case_study_one();
    let base = one.track_baseline()?;
    let host = one.pois.get(one.oversized).unwrap();
    let perimeter = one.oversized_perimeter()?;
    println!("{} serves {} of {} intersections", host.label, perimeter.len(), one.network.node_count());

    let site = one.manual_site()?;
    let mut edit = PoiEdit::add(site);
    edit.add.as_mut().unwrap().label = Some(CaseStudyOne::NEW_LABEL.into());
    let manual = what_if(&one.network, &one.pois, &edit, one.direction)?;
    println!("manual site {site}: {}", summary_line(base.total, manual.total));

    let plan = one.suggest()?;
    for m in &plan.moves {
        println!("suggested: move {} from {} to {}", m.label, m.old, m.new);
    }
    println!("{}", summary_line(manual.total, plan.totals_after));
    let suggested = track(&one.network, &plan.final_pois, one.direction)?;
    println!("\n{}\n", render_comparison(&base, &suggested));

    let two = case_study_two();
    let base = two.track_baseline()?;
    let (a, b) = two.pair;
    let (pa, pb) = (two.pois.get(a).unwrap(), two.pois.get(b).unwrap());
    println!("{} at {} and {} at {} share {} perimeter nodes", pa.label, pa.node, pb.label, pb.node, two.joint_perimeter()?.len());
    let merged = two.merged_pois()?;
    let merged_report = track(&two.network, &merged, two.direction)?;
    println!("merge at {}: {}", two.merge_site()?, summary_line(base.total, merged_report.total));
    let plan = two.suggest()?;
    println!("after reduce: {}", summary_line(merged_report.total, plan.totals_after));
    println!("\n{}", render_comparison(&base, &track(&two.network, &plan.final_pois, two.direction)?));
    Ok(())
}
