/** Browser bootstrap: wires the session console to a running service. */
import { ApiClient } from "./api.js";
import { draftToClause, inputAssumption } from "./invariants.js";
import { lanesFromPorts, laneToSignal, type MarbleLane } from "./marble.js";
import { renderApp, renderLane } from "./render.js";
import { SessionView } from "./view.js";
import type { CmpOp } from "./types.js";

function apiBase(): string {
  const param = new URLSearchParams(window.location.search).get("api");
  return param ?? window.location.origin;
}

async function boot(): Promise<void> {
  const api = new ApiClient(apiBase());
  const view = new SessionView(api);
  const mount = document.getElementById("app") ?? document.body;

  let editLanes: MarbleLane[] = [];
  let expectedLane: MarbleLane | null = null;

  const rerender = (): void => {
    mount.replaceChildren();

    const picker = document.createElement("div");
    picker.className = "picker";
    const select = document.createElement("select");
    select.id = "benchmark";
    picker.appendChild(select);
    const startBtn = document.createElement("button");
    startBtn.textContent = "start session";
    startBtn.addEventListener("click", async () => {
      const started = await view.start({ benchmark: select.value });
      if (started) {
        editLanes = lanesFromPorts(view.ports, view.length);
        expectedLane = {
          port: "expected output",
          kind: view.info!.out_kind === "behavior" ? "behavior" : "events",
          domain: [],
          editable: true,
          init: null,
          cells: Array.from({ length: view.length }, () => null),
        };
      }
      rerender();
    });
    picker.appendChild(startBtn);
    mount.appendChild(picker);
    void api.benchmarks().then((bs) => {
      select.replaceChildren(
        ...bs.map((b) => {
          const opt = document.createElement("option");
          opt.value = b.name;
          opt.textContent = `${b.name} (L=${b.length})`;
          return opt;
        }),
      );
    });

    if (view.info) {
      const editor = document.createElement("div");
      editor.className = "trace-editor";
      editLanes.forEach((lane, i) => {
        const handle = renderLane(document, lane, (next) => {
          editLanes[i] = next;
          rerender();
        });
        editor.appendChild(handle.root);
      });
      if (expectedLane) {
        const handle = renderLane(document, expectedLane, (next) => {
          expectedLane = next;
          rerender();
        });
        editor.appendChild(handle.root);
      }
      const submit = document.createElement("button");
      submit.textContent = "submit trace + expected output";
      submit.addEventListener("click", async () => {
        if (expectedLane) await view.addIoPair(editLanes, laneToSignal(expectedLane));
        rerender();
      });
      editor.appendChild(submit);
      const synth = document.createElement("button");
      synth.textContent = "synthesize";
      synth.addEventListener("click", async () => {
        await view.fetchCandidates();
        rerender();
      });
      editor.appendChild(synth);
      mount.appendChild(editor);
    }

    const app = renderApp(document, view);
    mount.appendChild(app);

    const controls = app.querySelector(".controls");
    if (controls) {
      const wire = (cls: string, fn: () => Promise<unknown>): void => {
        controls.querySelector(`.${cls}`)?.addEventListener("click", async () => {
          await fn();
          rerender();
        });
      };
      wire("accept-a", () => view.choose({ kind: "accept_a" }));
      wire("accept-b", () => view.choose({ kind: "accept_b" }));
      wire("abort", () => view.choose({ kind: "abort" }));
      wire("correct", async () => {
        if (expectedLane) {
          await view.choose({ kind: "correct", output: laneToSignal(expectedLane) });
        }
      });
      wire("invariant", async () => {
        const panel = app.querySelector(".invariant-panel");
        if (!panel) return;
        const macro = (panel.querySelector(".macro") as HTMLSelectElement).value;
        const a = (panel.querySelector(".port-a") as HTMLSelectElement).value;
        const b = (panel.querySelector(".port-b") as HTMLSelectElement).value;
        const op = (panel.querySelector(".cmp-op") as HTMLSelectElement).value;
        const clause = draftToClause(
          macro === "mutex"
            ? { macro: "mutex", ports: [a, b] }
            : macro === "alternate"
              ? { macro: "alternate", ports: [a, b] }
              : op === "present"
                ? { macro: "compare", ports: [a], everyStep: true }
                : {
                    macro: "compare",
                    ports: [a],
                    op: op as CmpOp,
                    value: { t: "int", v: 0 },
                    everyStep: true,
                  },
        );
        await view.addInvariant(inputAssumption(clause));
      });
    }
  };

  rerender();
}

void boot();
