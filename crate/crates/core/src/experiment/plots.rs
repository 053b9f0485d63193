use std::path::{Path, PathBuf};

use serde_json::Value;

use crate::error::{Error, Result};

/// Inputs recognised by [`emit_plots`], grouped by the script they feed.
pub const PLOT_INPUTS: &[&[&str]] = &[
    &["decay.csv", "fits.json"],
    &["linear_decay.csv", "linear_fits.json"],
    &["dispersion.csv", "summary.json"],
    &["regime_map.csv"],
];

fn read_json(path: &Path) -> Result<Value> {
    Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
}

fn py_float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:?}")
    } else {
        "float('nan')".into()
    }
}

const HEADER: &str = "import csv\nimport math\nimport os\n\nimport matplotlib\nmatplotlib.use(\"Agg\")\nimport matplotlib.pyplot as plt\n\nHERE = os.path.dirname(os.path.abspath(__file__))\n\n\ndef columns(name):\n    with open(os.path.join(HERE, name)) as f:\n        rows = list(csv.DictReader(f))\n    return {k: [r[k] for r in rows] for k in rows[0]}\n\n\n";

fn loglog_script(csv: &str, column: &str, label: &str, slope: f64, window: (f64, f64), png: &str) -> String {
    format!(
        "{HEADER}c = columns(\"{csv}\")\n\
t = [float(x) for x in c[\"t\"]]\n\
y = [float(x) for x in c[\"{column}\"]]\n\
pts = [(a, b) for a, b in zip(t, y) if a > 0 and b > 0]\n\
t, y = zip(*pts)\n\
slope = {slope}\n\
lo, hi = {lo}, {hi}\n\
anchor = min(range(len(t)), key=lambda i: abs(math.log(t[i] / lo)))\n\
ref_t = [x for x in t if lo <= x <= hi]\n\
ref_y = [y[anchor] * (x / t[anchor]) ** slope for x in ref_t]\n\
plt.loglog(t, y, \"o-\", ms=3, label=\"{label}\")\n\
plt.loglog(ref_t, ref_y, \"k--\", label=\"slope %.3f\" % slope)\n\
plt.axvspan(lo, hi, color=\"0.9\")\n\
plt.xlabel(\"t\")\n\
plt.ylabel(\"norm\")\n\
plt.legend()\n\
plt.savefig(os.path.join(HERE, \"{png}\"), dpi=150)\n",
        slope = py_float(slope),
        lo = py_float(window.0),
        hi = py_float(window.1),
    )
}

fn window_of(summary: Option<&Value>) -> (f64, f64) {
    summary
        .and_then(|s| s.get("window"))
        .and_then(|w| Some((w.get(0)?.as_f64()?, w.get(1)?.as_f64()?)))
        .unwrap_or((5.0, 500.0))
}

fn decay_scripts(dir: &Path, out: &mut Vec<PathBuf>) -> Result<()> {
    let fits = read_json(&dir.join("fits.json"))?;
    let summary = read_json(&dir.join("summary.json")).ok();
    let window = window_of(summary.as_ref());
    let header = std::fs::read_to_string(dir.join("decay.csv"))?;
    let cols: Vec<&str> = header.lines().next().unwrap_or("").split(',').collect();
    let lows: Vec<&str> = cols.iter().copied().filter(|c| c.starts_with("low_s")).collect();
    let fits = fits.as_array().cloned().unwrap_or_default();
    for (k, column) in lows.iter().enumerate() {
        let fit = fits.get(k).ok_or_else(|| Error::InvalidArgument(format!("fits.json has no entry for {column}")))?;
        let s = fit["s"].as_f64().unwrap_or(f64::NAN);
        let slope = fit["theoretical_slope"].as_f64().unwrap_or(f64::NAN);
        let name = format!("plot_decay_s{k}.py");
        let body = loglog_script("decay.csv", column, &format!("low-frequency norm, s = {s}"), slope, window, &format!("decay_s{k}.png"));
        std::fs::write(dir.join(&name), body)?;
        out.push(dir.join(name));
    }
    Ok(())
}

fn linear_scripts(dir: &Path, out: &mut Vec<PathBuf>) -> Result<()> {
    let fits = read_json(&dir.join("linear_fits.json"))?;
    let summary = read_json(&dir.join("summary.json")).ok();
    let window = window_of(summary.as_ref());
    for (k, fit) in fits.as_array().cloned().unwrap_or_default().iter().enumerate() {
        let s1 = fit["s1"].as_f64().unwrap_or(f64::NAN);
        let slope = fit["theoretical_slope"].as_f64().unwrap_or(f64::NAN);
        let name = format!("plot_linear_decay_{k}.py");
        let body = loglog_script(
            "linear_decay.csv",
            &format!("norm_s{s1}"),
            &format!("semigroup norm, s1 = {s1}"),
            slope,
            window,
            &format!("linear_decay_{k}.png"),
        );
        std::fs::write(dir.join(&name), body)?;
        out.push(dir.join(name));
    }
    Ok(())
}

fn dispersion_script(dir: &Path) -> Result<String> {
    let summary = read_json(&dir.join("summary.json"))?;
    let cross = summary["crossover"].as_f64().map(py_float).unwrap_or_else(|| "None".into());
    Ok(format!(
        "{HEADER}c = columns(\"dispersion.csv\")\n\
xi = [float(x) for x in c[\"xi_mag\"]]\n\
fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 4))\n\
for branch in (\"plus\", \"minus\"):\n\
    ax1.semilogx(xi, [-float(x) for x in c[\"re_lambda_\" + branch]], label=\"-Re lambda_\" + branch)\n\
    ax2.semilogx(xi, [float(x) for x in c[\"im_lambda_\" + branch]], label=\"Im lambda_\" + branch)\n\
ax1.set_yscale(\"log\")\n\
crossover = {cross}\n\
if crossover is not None:\n\
    for ax in (ax1, ax2):\n\
        ax.axvline(crossover, color=\"k\", ls=\":\", label=\"crossover\")\n\
for ax in (ax1, ax2):\n\
    ax.set_xlabel(\"|xi|\")\n\
    ax.legend()\n\
fig.tight_layout()\n\
fig.savefig(os.path.join(HERE, \"dispersion.png\"), dpi=150)\n"
    ))
}

fn regime_script() -> String {
    format!(
        "{HEADER}c = columns(\"regime_map.csv\")\n\
codes = {{\"complex_pair\": 0, \"double_root\": 1, \"real_pair\": 2}}\n\
colors = {{0: \"tab:blue\", 1: \"k\", 2: \"tab:orange\"}}\n\
g = [float(x) for x in c[\"gamma\"]]\n\
xi = [float(x) for x in c[\"xi_mag\"]]\n\
r = [codes[x] for x in c[\"regime\"]]\n\
floor = min([x for x in g if x > 0], default=1.0) / 10\n\
for code, name in ((0, \"complex pair\"), (2, \"real pair\"), (1, \"double root\")):\n\
    sel = [i for i in range(len(r)) if r[i] == code]\n\
    plt.scatter([xi[i] for i in sel], [max(g[i], floor) for i in sel], s=4, c=colors[code], label=name)\n\
plt.xscale(\"log\")\n\
plt.yscale(\"log\")\n\
plt.xlabel(\"|xi|\")\n\
plt.ylabel(\"gamma (gamma = 0 drawn at the bottom edge)\")\n\
plt.legend()\n\
plt.savefig(os.path.join(HERE, \"regime_map.png\"), dpi=150)\n"
    )
}

/// Writes self-contained matplotlib scripts next to the results in `dir`.
///
/// Each script reads its inputs relative to its own location and saves a PNG
/// beside them.
pub fn emit_plots(dir: &Path) -> Result<Vec<PathBuf>> {
    let has = |names: &[&str]| names.iter().all(|n| dir.join(n).is_file());
    let mut out = Vec::new();
    if has(PLOT_INPUTS[0]) {
        decay_scripts(dir, &mut out)?;
    }
    if has(PLOT_INPUTS[1]) {
        linear_scripts(dir, &mut out)?;
    }
    if has(PLOT_INPUTS[2]) {
        let path = dir.join("plot_dispersion.py");
        std::fs::write(&path, dispersion_script(dir)?)?;
        out.push(path);
    }
    if has(PLOT_INPUTS[3]) {
        let path = dir.join("plot_regime_map.py");
        std::fs::write(&path, regime_script())?;
        out.push(path);
    }
    if out.is_empty() {
        return Err(Error::MissingInputs {
            dir: dir.display().to_string(),
            expected: PLOT_INPUTS.iter().map(|g| g.join(" + ")).collect(),
        });
    }
    Ok(out)
}
