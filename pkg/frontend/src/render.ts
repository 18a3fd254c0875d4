/** DOM rendering. Pure functions from view state to elements; wiring the
 * elements back to view methods happens in main.ts.
 */
import { cycleCell, type MarbleLane } from "./marble.js";
import type { PendingView, SessionView } from "./view.js";
import { showCell, showValue } from "./values.js";

function el<K extends keyof HTMLElementTagNameMap>(
  doc: Document,
  tag: K,
  cls?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = doc.createElement(tag);
  if (cls) node.className = cls;
  if (text !== undefined) node.textContent = text;
  return node;
}

export interface LaneHandle {
  root: HTMLElement;
  lane: MarbleLane;
}

/**
 * One lane: a port label plus one cell element per timestep. Event cells are
 * chips (occurrence) or gaps; behavior cells form a ribbon with an extra
 * leading init cell. Clicking an editable cell cycles it through the gap and
 * the port's domain values, so edits cannot leave the domain.
 */
export function renderLane(
  doc: Document,
  lane: MarbleLane,
  onChange?: (lane: MarbleLane) => void,
): LaneHandle {
  const handle: LaneHandle = { root: el(doc, "div", "lane"), lane };
  handle.root.dataset.port = lane.port;
  handle.root.dataset.kind = lane.kind;
  const label = el(doc, "span", "lane-label", `${lane.port} [${lane.kind}]`);
  handle.root.appendChild(label);
  if (lane.kind === "behavior" && lane.init !== null) {
    const init = el(doc, "span", "cell ribbon init", showValue(lane.init));
    init.dataset.t = "init";
    handle.root.appendChild(init);
  }
  lane.cells.forEach((cell, t) => {
    const cls =
      lane.kind === "behavior"
        ? "cell ribbon"
        : cell === null
          ? "cell gap"
          : "cell chip";
    const btn = el(doc, "button", cls, showCell(cell));
    btn.dataset.t = String(t);
    btn.disabled = !lane.editable;
    if (lane.editable && onChange) {
      btn.addEventListener("click", () => {
        handle.lane = cycleCell(handle.lane, t);
        onChange(handle.lane);
      });
    }
    handle.root.appendChild(btn);
  });
  return handle;
}

function laneRow(doc: Document, lane: MarbleLane | null, errorLabel: string): HTMLElement {
  if (lane === null) return el(doc, "div", "lane lane-error", errorLabel);
  return renderLane(doc, lane).root;
}

/**
 * The pending pair: both pretty-printed candidates, the distinguishing
 * input, and both output lanes with the first differing timestep marked.
 */
export function renderCandidates(doc: Document, pv: PendingView): HTMLElement {
  const root = el(doc, "div", "candidates");
  const progs = el(doc, "div", "programs");
  const preA = el(doc, "pre", "pretty pretty-a", pv.prettyA);
  const preB = el(doc, "pre", "pretty pretty-b", pv.prettyB);
  progs.append(preA, preB);
  root.appendChild(progs);

  const input = el(doc, "div", "input-lanes");
  for (const lane of pv.inputLanes) input.appendChild(renderLane(doc, lane).root);
  root.appendChild(input);

  const outs = el(doc, "div", "output-lanes");
  outs.append(
    laneRow(doc, pv.outLaneA, "candidate A errors"),
    laneRow(doc, pv.outLaneB, "candidate B errors"),
  );
  if (pv.diffAt !== null) {
    outs.dataset.diffAt = String(pv.diffAt);
    for (const row of Array.from(outs.children)) {
      const cell = row.querySelector(`[data-t="${pv.diffAt}"]`);
      if (cell) cell.classList.add("diff-first");
    }
  }
  root.appendChild(outs);
  return root;
}

export interface Controls {
  root: HTMLElement;
  acceptA: HTMLButtonElement;
  acceptB: HTMLButtonElement;
  correct: HTMLButtonElement;
  invariant: HTMLButtonElement;
  abort: HTMLButtonElement;
}

/** Answer buttons; all disabled unless a candidate pair is pending. */
export function renderControls(doc: Document, view: SessionView): Controls {
  const root = el(doc, "div", "controls");
  const mk = (label: string, cls: string) => {
    const b = el(doc, "button", `ctl ${cls}`, label);
    b.disabled = !view.canAnswer;
    root.appendChild(b);
    return b;
  };
  return {
    root,
    acceptA: mk("accept A", "accept-a"),
    acceptB: mk("accept B", "accept-b"),
    correct: mk("correct output", "correct"),
    invariant: mk("add invariant", "invariant"),
    abort: mk("abort", "abort"),
  };
}

/** Invariant panel: macro picker limited to mutex / alternate / compare. */
export function renderInvariantPanel(doc: Document, ports: string[]): HTMLElement {
  const root = el(doc, "div", "invariant-panel");
  const macro = el(doc, "select", "macro");
  for (const name of ["mutex", "alternate", "compare"]) {
    const opt = el(doc, "option", undefined, name);
    opt.value = name;
    macro.appendChild(opt);
  }
  root.appendChild(macro);
  for (const slot of ["a", "b"]) {
    const sel = el(doc, "select", `port-${slot}`);
    for (const p of ports) {
      const opt = el(doc, "option", undefined, p);
      opt.value = p;
      sel.appendChild(opt);
    }
    root.appendChild(sel);
  }
  const op = el(doc, "select", "cmp-op");
  for (const o of ["present", "eq", "ne", "le", "lt"]) {
    const opt = el(doc, "option", undefined, o);
    opt.value = o;
    op.appendChild(opt);
  }
  root.appendChild(op);
  return root;
}

export function renderStatus(doc: Document, view: SessionView): HTMLElement {
  const root = el(doc, "div", "status");
  root.appendChild(el(doc, "span", "state", view.status));
  if (view.lastError) {
    const err = el(
      doc,
      "div",
      "error",
      `${view.lastError.status}: ${view.lastError.detail}`,
    );
    root.appendChild(err);
  }
  const log = el(doc, "ul", "action-log");
  for (const entry of view.actionLog) log.appendChild(el(doc, "li", undefined, entry));
  root.appendChild(log);
  return root;
}

export function renderSpecList(doc: Document, view: SessionView): HTMLElement {
  const root = el(doc, "ul", "spec-items");
  for (const item of view.specItems) {
    const kind = item.item;
    const text =
      kind === "io_pair" ? "io pair" : `${kind.replace("_", " ")}: ${JSON.stringify((item as { clause: unknown }).clause)}`;
    root.appendChild(el(doc, "li", `spec-${kind}`, text));
  }
  return root;
}

export function renderApp(doc: Document, view: SessionView): HTMLElement {
  const root = el(doc, "div", "app");
  root.appendChild(renderStatus(doc, view));
  root.appendChild(renderSpecList(doc, view));
  const pv = view.pending();
  if (pv) root.appendChild(renderCandidates(doc, pv));
  if (view.snap?.state === "done") {
    const done = el(doc, "pre", "final-program", view.snap.pretty ?? "");
    done.dataset.status = view.snap.status;
    root.appendChild(done);
  }
  root.appendChild(renderControls(doc, view).root);
  root.appendChild(renderInvariantPanel(doc, view.ports.map((p) => p.name)));
  return root;
}
