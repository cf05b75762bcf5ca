import { describe, expect, it } from "vitest";

import { SpecView, parseSpecText } from "../src/config";
import { SpecError } from "../src/errors";

describe("parseSpecText", () => {
  it("parses keys, values, and comments", () => {
    const m = parseSpecText(
      "# header\nkind = profile\n\nx_label = x (units) # trailing\n"
    );
    expect(m.get("kind")).toBe("profile");
    expect(m.get("x_label")).toBe("x (units)");
    expect(m.size).toBe(2);
  });

  it("rejects duplicate keys with the line number", () => {
    expect(() => parseSpecText("a = 1\na = 2\n")).toThrowError(
      /line 2: duplicate key 'a'/
    );
  });

  it("rejects lines without an equals sign", () => {
    expect(() => parseSpecText("just words\n")).toThrowError(
      /line 1: expected 'key = value'/
    );
  });

  it("rejects malformed keys and empty values", () => {
    expect(() => parseSpecText("Bad.Key = 1\n")).toThrow(SpecError);
    expect(() => parseSpecText("a =\n")).toThrowError(/empty value/);
  });
});

describe("SpecView", () => {
  it("enforces choices and bounds", () => {
    const view = new SpecView(parseSpecText("kind = bogus\nn = 0\n"));
    expect(() => view.getString("kind", undefined, ["profile"])).toThrowError(
      /not one of profile/
    );
    expect(() => view.getNumber("n", undefined, { lo: 0, loOpen: true }))
      .toThrowError(/below 0/);
  });

  it("requires missing keys by name", () => {
    const view = new SpecView(parseSpecText("a = 1\n"));
    expect(() => view.getString("out")).toThrowError(
      /missing required key 'out'/
    );
  });

  it("rejects unconsumed keys by name", () => {
    const view = new SpecView(parseSpecText("a = 1\nbanana = 2\n"));
    view.getNumber("a");
    expect(() => view.rejectUnknown()).toThrowError(/unknown key 'banana'/);
  });

  it("accepts integers and rejects fractions", () => {
    const view = new SpecView(parseSpecText("w = 800\nh = 1.5\n"));
    expect(view.getInt("w")).toBe(800);
    expect(() => view.getInt("h")).toThrowError(/not an integer/);
  });
});
