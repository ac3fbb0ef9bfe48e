//! Quick end-to-end check: run the bundled corpus and print the report.

fn main() {
    let lexicons = dparse::bundled::lexicons();
    let rows = dparse::bundled::corpus().expect("bundled corpus parses");
    let report = dparse::run_corpus(&lexicons, &rows, None).expect("corpus runs");
    print!("{}", report.render_tsv());
    for o in &report.outcomes {
        if !o.matches_model() {
            println!("--- mismatch: {}", o.row.sentence);
            for e in &o.report.events {
                println!("    {}", e.render(&o.report.description));
            }
        }
    }
}
