//! Generated matplotlib scripts that read the emitted CSV files.

const HEADER: &str = "import csv\nimport os\n\nimport matplotlib.pyplot as plt\n\nHERE = os.path.dirname(os.path.abspath(__file__))\n\n\ndef rows(name):\n    with open(os.path.join(HERE, name), newline=\"\") as fh:\n        return list(csv.DictReader(fh))\n\n\n";

pub fn rho_curves_plot(csv_name: &str) -> String {
    format!(
        "{HEADER}curves = {{}}\nfor r in rows(\"{csv_name}\"):\n    key = (float(r[\"ratio\"]), r[\"version\"])\n    curves.setdefault(key, ([], []))\n    curves[key][0].append(float(r[\"wt\"]))\n    curves[key][1].append(float(r[\"rho\"]))\n\nfor ratio in sorted({{k[0] for k in curves}}):\n    plt.figure()\n    for (rt, version), (wt, rho) in sorted(curves.items()):\n        if rt == ratio:\n            plt.semilogx(wt, rho, label=\"Version \" + version)\n    plt.xlabel(\"frequency\")\n    plt.ylabel(\"rho\")\n    plt.title(\"ratio %g\" % ratio)\n    plt.legend()\n    plt.savefig(os.path.join(HERE, \"rho_curves_%g.png\" % ratio))\n"
    )
}

pub fn root_scan_plot(csv_name: &str) -> String {
    format!(
        "{HEADER}data = rows(\"{csv_name}\")\np = [float(r[\"p\"]) for r in data]\nfor col in (\"lhs\", \"rhs\"):\n    plt.plot(p, [float(r[col]) for r in data], label=col)\nplt.xlabel(\"p\")\nplt.legend()\nplt.savefig(os.path.join(HERE, \"v3_root_scan.png\"))\n"
    )
}

/// One semilog error curve per `(file, label)` pair.
pub fn history_plot(histories: &[(String, String)]) -> String {
    let mut list = String::from("FILES = [\n");
    for (file, label) in histories {
        list.push_str(&format!("    ({file:?}, {label:?}),\n"));
    }
    list.push_str("]\n\n");
    format!(
        "{HEADER}{list}for name, label in FILES:\n    data = rows(name)\n    if data:\n        plt.semilogy([int(r[\"iteration\"]) for r in data], [float(r[\"error\"]) for r in data], label=label)\nplt.xlabel(\"iteration\")\nplt.ylabel(\"error\")\nplt.legend(fontsize=\"small\")\nplt.savefig(os.path.join(HERE, \"histories.png\"))\n"
    )
}

pub fn layered_plot(csv_name: &str) -> String {
    format!(
        "{HEADER}curves = {{}}\nfor r in rows(\"{csv_name}\"):\n    curves.setdefault(r[\"version\"], ([], []))\n    curves[r[\"version\"]][0].append(int(r[\"iteration\"]))\n    curves[r[\"version\"]][1].append(float(r[\"error\"]))\n\nfor version, (it, err) in sorted(curves.items()):\n    plt.semilogy(it, err, label=\"Version \" + version)\nplt.xlabel(\"iteration\")\nplt.ylabel(\"error\")\nplt.legend()\nplt.savefig(os.path.join(HERE, \"{csv_name}.png\"))\n"
    )
}
