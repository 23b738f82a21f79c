// Per-criterion weight sliders. The debounce/revert logic is a pure state
// machine so it can be unit-tested; createWeightPanel binds it to the DOM.

import { ClientMessage, Criterion } from "./protocol.js";

export interface SliderModel {
  criterion: Criterion;
  value: number; // last value confirmed by the service
  pendingId: number | null;
  pendingValue: number | null;
}

export interface WeightPanelModel {
  sliders: SliderModel[];
  nextId: number;
  debounceMs: number;
}

export function makePanelModel(criteria: Criterion[], weights: Record<string, number>, debounceMs = 150): WeightPanelModel {
  return {
    sliders: criteria.map((c) => ({
      criterion: c,
      value: weights[c] ?? 0,
      pendingId: null,
      pendingValue: null,
    })),
    nextId: 1,
    debounceMs,
  };
}

/** Slider moved; returns the message to send after the debounce window
 * (exactly one message per settled value). */
export function sliderSettled(model: WeightPanelModel, criterion: Criterion, value: number): ClientMessage {
  const s = model.sliders.find((x) => x.criterion === criterion);
  if (!s) throw new Error(`no slider for ${criterion}`);
  const id = model.nextId++;
  s.pendingId = id;
  s.pendingValue = value;
  return { type: "set_weight", criterion, value, id };
}

/** Apply a service ack; returns the criterion whose slider must revert
 * (error ack), or null. */
export function applyAck(model: WeightPanelModel, id: number | null, ok: boolean): Criterion | null {
  if (id === null) return null;
  const s = model.sliders.find((x) => x.pendingId === id);
  if (!s) return null;
  s.pendingId = null;
  if (ok) {
    s.value = s.pendingValue ?? s.value;
    s.pendingValue = null;
    return null;
  }
  s.pendingValue = null;
  return s.criterion; // caller reverts the DOM slider to s.value and toasts
}

// ---- DOM binding ----------------------------------------------------------

export interface WeightPanel {
  root: HTMLElement;
  model: WeightPanelModel;
  revert(criterion: Criterion): void;
}

export function createWeightPanel(
  criteria: Criterion[],
  weights: Record<string, number>,
  send: (msg: ClientMessage) => void,
): WeightPanel {
  const model = makePanelModel(criteria, weights);
  const root = document.createElement("div");
  root.className = "weight-panel";
  const inputs = new Map<Criterion, HTMLInputElement>();
  let timer: ReturnType<typeof setTimeout> | null = null;

  for (const s of model.sliders) {
    const row = document.createElement("label");
    row.className = "weight-row";
    const name = document.createElement("span");
    name.textContent = s.criterion;
    const input = document.createElement("input");
    input.type = "range";
    input.min = "0";
    input.max = "2";
    input.step = "0.01";
    input.value = String(s.value);
    const readout = document.createElement("span");
    readout.className = "weight-value";
    readout.textContent = s.value.toFixed(2);
    input.addEventListener("input", () => {
      readout.textContent = Number(input.value).toFixed(2);
      if (timer) clearTimeout(timer);
      timer = setTimeout(() => {
        send(sliderSettled(model, s.criterion, Number(input.value)));
      }, model.debounceMs);
    });
    row.append(name, input, readout);
    root.append(row);
    inputs.set(s.criterion, input);
  }

  return {
    root,
    model,
    revert(criterion: Criterion): void {
      const s = model.sliders.find((x) => x.criterion === criterion);
      const input = inputs.get(criterion);
      if (s && input) {
        input.value = String(s.value);
        const readout = input.nextElementSibling as HTMLElement | null;
        if (readout) readout.textContent = s.value.toFixed(2);
      }
    },
  };
}
