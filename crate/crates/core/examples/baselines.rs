// Heuristic split-antecedent baselines layered on a coreference output:
// discourse-new plural pronouns become anaphors and take either their
// nearest singular clusters or a seeded random draw of two to five.

use corefsplit::baselines::{self, BaselineConfig, BaselineModel};
use corefsplit::model::{parse_document, to_json_line};
use corefsplit::Side;

const SYS: &str = r#"{"doc_id":"news-17","tokens":["Acme","sued","Globex",",","and","Initech","joined",".","Regulators","watched",".","They","settled","in","May","."],"mentions":[{"id":0,"start":0,"end":1},{"id":1,"start":2,"end":3},{"id":2,"start":5,"end":6},{"id":3,"start":8,"end":9},{"id":4,"start":11,"end":12}],"chains":[{"id":0,"mentions":[0]},{"id":1,"mentions":[1]},{"id":2,"mentions":[2]},{"id":3,"mentions":[3]},{"id":4,"mentions":[4]}]}"#;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let sys = parse_document(SYS, Side::System, 1)?;
    let cfg = BaselineConfig::new(BaselineModel::Recent { x: 3 })?;
    println!("anaphors: {:?}", baselines::recognize_heuristic(&sys, &cfg.pronouns));

    let recent = baselines::apply(&sys, &cfg)?;
    println!("recent-3: {:?}", recent.split_relations);

    for seed in [1, 2, 3] {
        let random = baselines::apply(&sys, &BaselineConfig::new(BaselineModel::Random { seed })?)?;
        println!("random seed {seed}: {:?}", random.split_relations[0].antecedent_chains);
    }
    let again = baselines::apply(&sys, &BaselineConfig::new(BaselineModel::Random { seed: 1 })?)?;
    println!("seed 1 again: {}", to_json_line(&again)?);
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
