/** Invariant builder: the clause macros and comparisons the panel offers.
 *
 * The panel is deliberately narrow. Users pick a macro (mutex over event
 * ports, or strict alternation of two ports) or a single comparison on one
 * port at one step (optionally for every step), and the builder emits the
 * service's clause JSON. Free-form clause JSON never comes from the UI.
 */
import type { ClauseJson, CmpOp, ItemJson, TimeRefJson, ValueJson } from "./types.js";

export function mutex(ports: string[]): ClauseJson {
  if (ports.length < 2) throw new Error("mutex needs at least two ports");
  return { c: "mutex", ports: [...ports] };
}

export function alternate(first: string, second: string): ClauseJson {
  return { c: "alternate", a_port: first, b_port: second };
}

export function at(t: number): TimeRefJson {
  return { at: t };
}

export function present(port: string, when: TimeRefJson): ClauseJson {
  return { c: "present", port, when };
}

export function valueCmp(
  port: string,
  when: TimeRefJson,
  op: CmpOp,
  value: ValueJson,
): ClauseJson {
  return { c: "valuecmp", port, when, op, value };
}

export function not(body: ClauseJson): ClauseJson {
  return { c: "not", body };
}

/** Quantify a comparison over every step: forall t. body(t). */
export function forallSteps(body: (when: TimeRefJson) => ClauseJson): ClauseJson {
  return { c: "forall", var: "t", body: body({ var: "t" }) };
}

export function inputAssumption(clause: ClauseJson, note = ""): ItemJson {
  const item: ItemJson = { item: "input_assumption", clause };
  if (note) item.note = note;
  return item;
}

export function outputConstraint(clause: ClauseJson, note = ""): ItemJson {
  const item: ItemJson = { item: "output_constraint", clause };
  if (note) item.note = note;
  return item;
}

/** One row of the invariant panel, ready to render as a form. */
export interface InvariantDraft {
  macro: "mutex" | "alternate" | "compare";
  ports: string[];
  op?: CmpOp;
  value?: ValueJson;
  atStep?: number;
  everyStep?: boolean;
  negate?: boolean;
}

export function draftToClause(d: InvariantDraft): ClauseJson {
  if (d.macro === "mutex") return mutex(d.ports);
  if (d.macro === "alternate") {
    const [a, b] = d.ports;
    if (!a || !b) throw new Error("alternate needs exactly two ports");
    return alternate(a, b);
  }
  const port = d.ports[0];
  if (!port) throw new Error("comparison needs a port");
  const mk = (when: TimeRefJson): ClauseJson => {
    const base =
      d.op && d.value !== undefined
        ? valueCmp(port, when, d.op, d.value)
        : present(port, when);
    return d.negate ? not(base) : base;
  };
  if (d.everyStep) return forallSteps(mk);
  return mk(at(d.atStep ?? 0));
}
