import { describe, expect, it } from "vitest";
import { parseRunLog, parseSweep, SchemaError } from "../src/csv.js";
import { fixture } from "./helpers.js";

describe("parseRunLog", () => {
  it("reads a real run log", () => {
    const log = parseRunLog(fixture("medoe-expert-s0.csv"), "f");
    expect(log.doeColumns).toEqual([
      "doe_rate_agent_1",
      "doe_rate_agent_2",
      "doe_rate_agent_3",
      "doe_rate_agent_4",
    ]);
    expect(log.sourceColumns).toEqual([
      "source_return_subteam_1",
      "source_return_subteam_2",
    ]);
    expect(log.rows.length).toBe(13);
    const first = log.rows[0];
    expect(first.baseline).toBe("medoe-expert");
    expect(first.env).toBe("chainball");
    expect(first.teamId).toBe("d0a0");
    expect(first.seed).toBe(0);
    expect(first.totalStep).toBe(1600);
    expect(first.doeRates.every((v) => v !== null)).toBe(true);
    expect(first.sourceReturns.length).toBe(2);
  });

  it("keeps blank cells as null", () => {
    const log = parseRunLog(fixture("pre-skilled-bp-s0.csv"), "f");
    expect(log.rows[0].doeRates).toEqual([null, null, null, null]);
    expect(log.rows[0].sourceReturns.every((v) => v !== null)).toBe(true);
  });

  it("rejects an empty file", () => {
    expect(() => parseRunLog("", "runs.csv")).toThrow(SchemaError);
    expect(() => parseRunLog("", "runs.csv")).toThrow(/runs\.csv: file is empty/);
  });

  it("rejects a header-only file", () => {
    expect(() => parseRunLog(fixture("empty.csv"), "empty.csv")).toThrow(/no data rows/);
  });

  it("names a missing fixed column", () => {
    expect(() => parseRunLog(fixture("bad-missing-column.csv"), "bad.csv")).toThrow(
      /bad\.csv: expected column 'ci95' at position 8, found 'stderr95'/,
    );
  });

  it("names an unexpected trailing column", () => {
    const text =
      "run_id,baseline,env,team_id,seed,total_step,mean_return,ci95,notes\n" +
      "r,b,e,t,0,1,0.5,0.1,hello\n";
    expect(() => parseRunLog(text, "f")).toThrow(/unexpected column 'notes'/);
  });

  it("rejects doe columns appearing after source columns", () => {
    const text =
      "run_id,baseline,env,team_id,seed,total_step,mean_return,ci95," +
      "source_return_subteam_1,doe_rate_agent_1\n" +
      "r,b,e,t,0,1,0.5,0.1,0.2,0.3\n";
    expect(() => parseRunLog(text, "f")).toThrow(/unexpected column 'doe_rate_agent_1'/);
  });

  it("names the column holding a non-numeric cell", () => {
    const text =
      "run_id,baseline,env,team_id,seed,total_step,mean_return,ci95\n" +
      "r,b,e,t,0,1,oops,0.1\n";
    expect(() => parseRunLog(text, "f")).toThrow(
      /column 'mean_return' has non-numeric value 'oops' at data row 1/,
    );
  });

  it("rejects ragged rows", () => {
    const text =
      "run_id,baseline,env,team_id,seed,total_step,mean_return,ci95\n" + "r,b,e,t,0,1,0.5\n";
    expect(() => parseRunLog(text, "f")).toThrow(/data row 1 has 7 cells, header has 8/);
  });
});

describe("parseSweep", () => {
  it("reads a real sweep table", () => {
    const rows = parseSweep(fixture("sweep-temperature_boost.csv"), "f");
    expect(rows.length).toBe(1024);
    expect(rows.every((r) => r.parameter === "temperature_boost")).toBe(true);
    expect(rows.every((r) => Number.isFinite(r.value) && r.value > 0)).toBe(true);
    expect(rows.every((r) => Number.isFinite(r.auc))).toBe(true);
  });

  it("names a wrong header column", () => {
    const text = "parameter,value,seed,score\nt,1.0,0,2.0\n";
    expect(() => parseSweep(text, "s.csv")).toThrow(
      /s\.csv: expected column 'auc' at position 4, found 'score'/,
    );
  });

  it("rejects extra columns", () => {
    const text = "parameter,value,seed,auc,extra\nt,1.0,0,2.0,x\n";
    expect(() => parseSweep(text, "f")).toThrow(/unexpected column 'extra'/);
  });

  it("rejects a header-only file", () => {
    expect(() => parseSweep("parameter,value,seed,auc\n", "f")).toThrow(/no data rows/);
  });
});
