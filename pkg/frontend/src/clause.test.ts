import { describe, expect, it } from "vitest";

import {
  CATEGORICAL_OPERATORS,
  NUMERIC_OPERATORS,
  formatClause,
  formatNumericValue,
  operatorsFor,
  parseClause,
  validateRow,
} from "./clause.js";
import type { SchemaInfo } from "./types.js";

const schema: SchemaInfo = {
  features: [
    { name: "duration", kind: "numeric" },
    { name: "age", kind: "numeric" },
    { name: "poutcome", kind: "categorical", domain: ["failure", "nonexistent", "success"] },
  ],
  labels: ["no", "yes"],
};

describe("operator constraints", () => {
  it("numeric features allow all six operators", () => {
    expect(operatorsFor("numeric")).toEqual(NUMERIC_OPERATORS);
  });

  it("categorical features allow equality operators only", () => {
    expect(operatorsFor("categorical")).toEqual(CATEGORICAL_OPERATORS);
    expect(operatorsFor("categorical")).not.toContain(">");
  });
});

describe("clause formatting", () => {
  it("quotes categorical values and keeps one decimal on integral numbers", () => {
    const text = formatClause(
      [
        { feature: "duration", operator: "<=", value: "368" },
        { feature: "poutcome", operator: "==", value: "success" },
      ],
      schema,
    );
    expect(text).toBe('duration <= 368.0 AND poutcome == "success"');
  });

  it("keeps fractional values as typed", () => {
    expect(formatNumericValue(5.8)).toBe("5.8");
    expect(formatNumericValue(-3)).toBe("-3.0");
  });
});

describe("clause parsing", () => {
  it("round-trips service clause text", () => {
    const text = 'duration <= 368.0 AND poutcome != "failure"';
    expect(formatClause(parseClause(text, schema), schema)).toBe(text);
  });

  it("parses all comparison operators", () => {
    for (const op of NUMERIC_OPERATORS) {
      const rows = parseClause(`age ${op} 30.0`, schema);
      expect(rows).toEqual([{ feature: "age", operator: op, value: "30.0" }]);
    }
  });

  it("empty text yields no rows", () => {
    expect(parseClause("", schema)).toEqual([]);
  });

  it("rejects unknown features and unquoted categories", () => {
    expect(() => parseClause("ghost > 1.0", schema)).toThrow(/unknown feature/);
    expect(() => parseClause("poutcome == success", schema)).toThrow(/quoted/);
  });
});

describe("row validation", () => {
  it("accepts a valid numeric row", () => {
    expect(validateRow({ feature: "age", operator: ">", value: "30" }, schema).valid).toBe(true);
  });

  it("rejects non-numeric values for numeric features", () => {
    const result = validateRow({ feature: "age", operator: ">", value: "abc" }, schema);
    expect(result.valid).toBe(false);
    expect(result.message).toMatch(/number/);
  });

  it("rejects ordering operators on categorical features", () => {
    const result = validateRow({ feature: "poutcome", operator: ">", value: "success" }, schema);
    expect(result.valid).toBe(false);
  });

  it("rejects categories outside the domain", () => {
    const result = validateRow({ feature: "poutcome", operator: "==", value: "nope" }, schema);
    expect(result.valid).toBe(false);
  });
});
