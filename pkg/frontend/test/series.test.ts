import { describe, expect, it } from "vitest";
import { parseRunLog, RunRow, SchemaError, SweepRow } from "../src/csv.js";
import { bandByBaseline, forgettingPanels, sensitivitySeries } from "../src/series.js";
import { fixture } from "./helpers.js";

function row(partial: Partial<RunRow>): RunRow {
  return {
    runId: "r",
    baseline: "b",
    env: "chainball",
    teamId: "t",
    seed: 0,
    totalStep: 0,
    meanReturn: 0,
    ci95: 0,
    doeRates: [],
    sourceReturns: [],
    ...partial,
  };
}

function sweepRow(value: number, auc: number): SweepRow {
  return { parameter: "temperature_boost", value, seed: 0, auc };
}

describe("bandByBaseline", () => {
  it("averages aligned runs and puts a 95% band around the mean", () => {
    const rows = [
      row({ runId: "a", totalStep: 0, meanReturn: 1 }),
      row({ runId: "a", totalStep: 10, meanReturn: 3 }),
      row({ runId: "b", seed: 1, totalStep: 0, meanReturn: 3 }),
      row({ runId: "b", seed: 1, totalStep: 10, meanReturn: 5 }),
    ];
    const [series] = bandByBaseline(rows, (r) => r.meanReturn);
    expect(series.runs).toBe(2);
    expect(series.steps).toEqual([0, 10]);
    expect(series.mean).toEqual([2, 4]);
    // sample sd of {1,3} is sqrt(2); half-width 1.96*sqrt(2)/sqrt(2) = 1.96
    expect(series.hi[0]).toBeCloseTo(3.96, 12);
    expect(series.lo[0]).toBeCloseTo(0.04, 12);
  });

  it("gives a single run a band of exactly zero width", () => {
    const log = parseRunLog(fixture("medoe-expert-s0.csv"), "f");
    const [series] = bandByBaseline(log.rows, (r) => r.meanReturn);
    expect(series.runs).toBe(1);
    expect(series.lo).toEqual(series.mean);
    expect(series.hi).toEqual(series.mean);
  });

  it("interpolates runs onto the union grid inside the shared range", () => {
    const rows = [
      row({ runId: "a", totalStep: 0, meanReturn: 0 }),
      row({ runId: "a", totalStep: 20, meanReturn: 20 }),
      row({ runId: "b", seed: 1, totalStep: 10, meanReturn: 0 }),
      row({ runId: "b", seed: 1, totalStep: 30, meanReturn: 40 }),
    ];
    const [series] = bandByBaseline(rows, (r) => r.meanReturn);
    // shared coverage is [10, 20]; union grid keeps both eval points
    expect(series.steps).toEqual([10, 20]);
    expect(series.mean[0]).toBeCloseTo((10 + 0) / 2, 12);
    expect(series.mean[1]).toBeCloseTo((20 + 20) / 2, 12);
  });

  it("keeps baselines in first-appearance order", () => {
    const rows = [
      row({ baseline: "z-first", totalStep: 0 }),
      row({ baseline: "a-second", runId: "q", totalStep: 0 }),
      row({ baseline: "z-first", totalStep: 10 }),
      row({ baseline: "a-second", runId: "q", totalStep: 10 }),
    ];
    const labels = bandByBaseline(rows, (r) => r.meanReturn).map((s) => s.label);
    expect(labels).toEqual(["z-first", "a-second"]);
  });

  it("sorts out-of-order rows by step before averaging", () => {
    const rows = [
      row({ totalStep: 10, meanReturn: 5 }),
      row({ totalStep: 0, meanReturn: 1 }),
    ];
    const [series] = bandByBaseline(rows, (r) => r.meanReturn);
    expect(series.steps).toEqual([0, 10]);
    expect(series.mean).toEqual([1, 5]);
  });
});

describe("sensitivitySeries", () => {
  it("keeps a constant AUC flat", () => {
    const rows = Array.from({ length: 200 }, (_, i) => sweepRow(0.5 + i * 0.05, 2.25));
    const { medianLine } = sensitivitySeries(rows);
    expect(medianLine.every((p) => p.auc === 2.25)).toBe(true);
  });

  it("preserves monotone structure", () => {
    const rows = Array.from({ length: 300 }, (_, i) => sweepRow(0.5 + i * 0.01, i * i));
    const { points, medianLine } = sensitivitySeries(rows);
    for (let i = 1; i < points.length; i++) {
      expect(points[i].value).toBeGreaterThanOrEqual(points[i - 1].value);
      expect(medianLine[i].auc).toBeGreaterThanOrEqual(medianLine[i - 1].auc);
    }
  });

  it("handles the committed 1024-sample sweep", () => {
    const rows = fixture("sweep-temperature_boost.csv")
      .trim()
      .split("\n")
      .slice(1)
      .map((line) => {
        const [parameter, value, seed, auc] = line.split(",");
        return { parameter, value: +value, seed: +seed, auc: +auc };
      });
    const { points, medianLine } = sensitivitySeries(rows);
    expect(points.length).toBe(1024);
    expect(medianLine.length).toBe(1024);
    expect(medianLine.every((p) => Number.isFinite(p.auc))).toBe(true);
  });

  it("rejects mixed parameters", () => {
    const rows = [sweepRow(1, 1), { ...sweepRow(2, 2), parameter: "kl_boost" }];
    expect(() => sensitivitySeries(rows)).toThrow(
      /mixes parameters 'temperature_boost' and 'kl_boost'/,
    );
  });
});

describe("forgettingPanels", () => {
  it("builds one panel per sub-team across baselines", () => {
    const logs = [
      "medoe-expert-s0.csv",
      "medoe-expert-s1.csv",
      "medoe-expert-no-bp-s0.csv",
      "medoe-expert-no-bp-s1.csv",
    ].map((name) => ({ log: parseRunLog(fixture(name), name), label: name }));
    const panels = forgettingPanels(logs);
    expect(panels.map((p) => p.column)).toEqual([
      "source_return_subteam_1",
      "source_return_subteam_2",
    ]);
    for (const panel of panels) {
      expect(panel.series.map((s) => s.label)).toEqual([
        "medoe-expert",
        "medoe-expert-no-BP",
      ]);
      expect(panel.series.every((s) => s.runs === 2)).toBe(true);
    }
  });

  it("names the blank column", () => {
    const logs = [
      {
        log: parseRunLog(fixture("no-source-returns.csv"), "no-source-returns.csv"),
        label: "no-source-returns.csv",
      },
    ];
    expect(() => forgettingPanels(logs)).toThrow(SchemaError);
    expect(() => forgettingPanels(logs)).toThrow(
      /no-source-returns\.csv: column 'source_return_subteam_1' is blank at total_step 1600/,
    );
  });

  it("rejects logs without source columns", () => {
    const text =
      "run_id,baseline,env,team_id,seed,total_step,mean_return,ci95\n" +
      "r,b,e,t,0,1,0.5,0.1\n";
    const logs = [{ log: parseRunLog(text, "plain.csv"), label: "plain.csv" }];
    expect(() => forgettingPanels(logs)).toThrow(
      /plain\.csv: no source_return_subteam columns/,
    );
  });

  it("rejects mismatched column sets across files", () => {
    const one =
      "run_id,baseline,env,team_id,seed,total_step,mean_return,ci95,source_return_subteam_1\n" +
      "r,b,e,t,0,1,0.5,0.1,0.2\n";
    const two =
      "run_id,baseline,env,team_id,seed,total_step,mean_return,ci95," +
      "source_return_subteam_1,source_return_subteam_2\n" +
      "r,c,e,t,0,1,0.5,0.1,0.2,0.3\n";
    const logs = [
      { log: parseRunLog(one, "one.csv"), label: "one.csv" },
      { log: parseRunLog(two, "two.csv"), label: "two.csv" },
    ];
    expect(() => forgettingPanels(logs)).toThrow(/two\.csv: source columns .* do not match/);
  });
});
