//! Reads a partition config, computes its spectrum and writes CSV, SVG and a
//! manifest into a temporary directory.

use spectral_partitions::io::{fmt_num, OutputDir, RunConfig, RunManifest, SvgPlot, Table};
use spectral_partitions::plap::{assemble_plap, extract_nodal_partition, solve_eigs};

const CONFIG: &str = include_str!("../configs/square_cross.toml");

fn main() -> spectral_partitions::Result<()> {
    let cfg = RunConfig::from_toml(CONFIG)?;
    let p = cfg.partition()?;
    let op = assemble_plap(&p, cfg.grid.n)?;
    let res = solve_eigs(&op, cfg.grid.count)?;

    let dir = std::env::temp_dir().join("spl-config-example");
    let mut out = OutputDir::create(&dir)?;
    let mut t = Table::new(&["index", "eigenvalue", "residual", "position"]);
    for (i, (e, &pos)) in res.pairs.iter().zip(&res.positions).enumerate() {
        t.push(vec![(i + 1).into(), e.value.into(), e.residual.into(), pos.into()]);
        println!("{}, {}, position {pos}", i + 1, fmt_num(e.value));
    }
    out.csv("spectrum.csv", &t)?;

    let nodal = extract_nodal_partition(&res.pairs[3].vector, &op)?;
    let mut plot = SvgPlot::for_domain(&p.domain);
    for l in &nodal.polylines {
        plot.polyline(l, "blue", 2.0, false);
    }
    out.csv("nodal_lines.csv", &Table::polylines(&nodal.polylines))?;
    out.svg("nodal.svg", &plot)?;
    let manifest = RunManifest {
        command: "config-example".into(),
        arguments: serde_json::Value::Null,
        config: serde_json::to_value(&cfg).ok(),
        versions: spectral_partitions::io::versions(),
        wall_time_s: 0.0,
        outputs: Vec::new(),
        tolerances: Default::default(),
    };
    println!("wrote {}", out.finish(manifest)?.display());
    Ok(())
}
