/** The five figure kinds, each built from the experiment CLI's public
 * artifacts (trajectory/curve CSVs and JSON reports), never by recomputing
 * physics: fitted constants and markers are read off the reports. */

import { ArtifactError, column, readCsv, readReport, Table } from "./data.js";
import { PlotSpec, renderSvg } from "./svg.js";

export const FIGURE_KINDS = [
  "q_series",
  "decay",
  "phi_curve",
  "margin_sweep",
  "limits",
] as const;

export type FigureKind = (typeof FIGURE_KINDS)[number];

export interface Inputs {
  csv?: Table;
  csvPath?: string;
  report?: Record<string, unknown>;
}

/** Annotation precision: 6 significant digits, matching the report values. */
export function printed(v: number): string {
  return Number(v).toPrecision(6);
}

export function loadInputs(paths: string[]): Inputs {
  const out: Inputs = {};
  for (const p of paths) {
    if (p.endsWith(".csv")) {
      out.csv = readCsv(p);
      out.csvPath = p;
    } else if (p.endsWith(".json")) {
      out.report = readReport(p);
    } else {
      throw new ArtifactError(`unrecognized input ${p}: expected .csv or .json`);
    }
  }
  return out;
}

function needCsv(inputs: Inputs, kind: string): Table {
  if (!inputs.csv) throw new ArtifactError(`figure ${kind} needs a CSV input`);
  return inputs.csv;
}

function needReport(inputs: Inputs, kind: string): Record<string, unknown> {
  if (!inputs.report) throw new ArtifactError(`figure ${kind} needs a JSON report input`);
  return inputs.report;
}

function qSeries(inputs: Inputs): PlotSpec {
  const tab = needCsv(inputs, "q_series");
  const t = column(tab, "t", inputs.csvPath);
  const q = column(tab, "Q", inputs.csvPath);
  return {
    title: "Weighted mean-curvature functional along the flow",
    xAxis: { label: "flow time t" },
    yAxis: { label: "Q(t)" },
    series: [{ x: t, y: q }],
    annotations: [
      {
        x: t[t.length - 1]!,
        y: q[q.length - 1]!,
        text: `Q(T) = ${printed(q[q.length - 1]!)}`,
      },
    ],
  };
}

interface DecayFit {
  C: number | null;
  alpha: number | null;
  status: string;
}

function decay(inputs: Inputs): PlotSpec {
  const tab = needCsv(inputs, "decay");
  const report = needReport(inputs, "decay");
  const fits = (report["decay_fits"] ?? {}) as Record<string, DecayFit>;
  const t = column(tab, "t", inputs.csvPath);
  const series: PlotSpec["series"] = [];
  const annotations: PlotSpec["annotations"] = [];
  const diagnostics = ["roundness_defect", "gtilde_defect"] as const;
  diagnostics.forEach((name, i) => {
    const y = column(tab, name, inputs.csvPath);
    if (!y.some((v) => v > 1e-13)) return; // diagnostic at roundoff floor
    series.push({ x: t, y });
    const fit = fits[name];
    if (fit && fit.status === "ok" && fit.C != null && fit.alpha != null) {
      const { C, alpha } = fit;
      series.push({
        x: t,
        y: t.map((tv) => C * Math.exp(-alpha * tv)),
        dash: "5,4",
        width: 1,
      });
      const mid = Math.floor(t.length / 2);
      annotations.push({
        x: t[mid]!,
        y: C * Math.exp(-alpha * t[mid]!),
        text: `${name}: C = ${printed(C)}, alpha = ${printed(alpha)}`,
        marker: false,
        color: i === 0 ? "#1f6fb2" : "#27825e",
      });
    }
  });
  if (series.length === 0) {
    throw new ArtifactError("decay figure: every diagnostic sits at the roundoff floor");
  }
  return {
    title: "Exponential decay of roundness diagnostics",
    xAxis: { label: "flow time t" },
    yAxis: { label: "defect (log scale)", scale: "log" },
    series,
    annotations,
  };
}

function phiCurve(inputs: Inputs): PlotSpec {
  const tab = needCsv(inputs, "phi_curve");
  const report = needReport(inputs, "phi_curve");
  const mStar = report["m_star"] as number;
  const minPhi = report["min_phi"] as number;
  if (typeof mStar !== "number" || typeof minPhi !== "number") {
    throw new ArtifactError("phi_curve report lacks m_star / min_phi");
  }
  return {
    title: "Round-boundary energy curve",
    xAxis: { label: "comparison mass m" },
    yAxis: { label: "Phi(m)" },
    series: [{ x: column(tab, "m", inputs.csvPath), y: column(tab, "phi", inputs.csvPath) }],
    annotations: [
      { x: mStar, y: minPhi, text: `(m*, min) = (${printed(mStar)}, ${printed(minPhi)})` },
    ],
  };
}

function marginSweep(inputs: Inputs): PlotSpec {
  const tab = needCsv(inputs, "margin_sweep");
  const mh = column(tab, "m_hat", inputs.csvPath);
  return {
    title: "Main-inequality margin across matched masses",
    xAxis: { label: "matched mass" },
    yAxis: { label: "energy margin" },
    series: [
      { x: mh, y: column(tab, "margin", inputs.csvPath), markers: true },
      {
        x: mh,
        y: column(tab, "margin_energy_path", inputs.csvPath),
        dash: "5,4",
        markers: true,
      },
    ],
    annotations: [{ x: mh[0]!, y: 0, text: "closed form vs energy path", marker: false }],
  };
}

function limits(inputs: Inputs): PlotSpec {
  const tab = needCsv(inputs, "limits");
  const rho = column(tab, "rho", inputs.csvPath);
  const energy = column(tab, "energy", inputs.csvPath);
  const volume = column(tab, "volume_ratio", inputs.csvPath);
  const annotations: PlotSpec["annotations"] = [];
  if (inputs.report) {
    const limit = inputs.report["richardson_limit"];
    if (typeof limit === "number") {
      annotations.push({
        x: rho[rho.length - 1]!,
        y: energy[energy.length - 1]!,
        text: `Richardson limit = ${printed(limit)}`,
      });
    }
  }
  return {
    title: "Large-sphere limits: energy and volume deficit",
    xAxis: { label: "sphere radius rho (log scale)", scale: "log" },
    yAxis: { label: "energy / normalized volume deficit" },
    series: [
      { x: rho, y: energy, markers: true },
      { x: rho, y: volume, markers: true },
    ],
    annotations,
  };
}

const BUILDERS: Record<FigureKind, (inputs: Inputs) => PlotSpec> = {
  q_series: qSeries,
  decay,
  phi_curve: phiCurve,
  margin_sweep: marginSweep,
  limits,
};

export function buildFigure(kind: FigureKind, inputs: Inputs): PlotSpec {
  const builder = BUILDERS[kind];
  if (!builder) {
    throw new ArtifactError(
      `unknown figure kind ${kind}; expected one of ${FIGURE_KINDS.join(", ")}`,
    );
  }
  return builder(inputs);
}

export function renderFigure(kind: FigureKind, paths: string[]): string {
  return renderSvg(buildFigure(kind, loadInputs(paths)));
}
