import { describe, expect, it } from "vitest";

import { accuracyText, clauseText, displayProb, literalText } from "../src/format.js";

describe("formatting", () => {
  it("renders probabilities at two decimals", () => {
    expect(displayProb(0.34603117471501993)).toBe("0.35");
    expect(displayProb(1)).toBe("1.00");
    expect(displayProb(0)).toBe("0.00");
  });

  it("does not mutate the underlying value", () => {
    const value = 0.8402314780591581;
    displayProb(value);
    expect(value).toBe(0.8402314780591581);
  });

  it("renders literals with negation", () => {
    expect(literalText("people_were", "arrested", false)).toBe("arrested @ people_were");
    expect(literalText("people_were", "kidnapped", true)).toBe("NOT kidnapped @ people_were");
    expect(clauseText(["a", "b"])).toBe("a AND b");
  });

  it("renders accuracy lines sorted by class", () => {
    expect(accuracyText({ B: 0.5, A: 1.0 })).toEqual(["A: 100%", "B: 50%"]);
  });
});
