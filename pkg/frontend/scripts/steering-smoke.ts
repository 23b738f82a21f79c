// Scripted end-to-end steering smoke against a live service.
//
// Start the service first, e.g.:
//   gdlayout serve path/to/dodecahedron.yaml --port 8765
// then:
//   npm run smoke -- ws://127.0.0.1:8765
//
// The script watches the CAM quality readout, raises the CAM weight from 0
// to 1 mid-run, and passes when the readout trends downward within 500
// iterations of the change.

import WebSocket from "ws";

import { decodeFrame, encodeMessage, StateFrame } from "../src/protocol.js";

const url = process.argv[2] ?? "ws://127.0.0.1:8765";
const WINDOW = 500;

function mean(xs: number[]): number {
  return xs.reduce((a, b) => a + b, 0) / xs.length;
}

const ws = new WebSocket(url);
const before: number[] = [];
const after: number[] = [];
let switched = false;
let switchIteration = 0;

ws.on("open", () => console.log(`connected to ${url}`));
ws.on("message", (data: Buffer) => {
  const frame = decodeFrame(data.toString());
  if (frame.type === "hello") {
    console.log(`graph ${frame.graph}: n=${frame.n}, criteria ${frame.criteria.join(",")}`);
    if (!frame.criteria.includes("CAM")) {
      console.error("service must run with a CAM criterion (weight 0 to start)");
      process.exit(2);
    }
    return;
  }
  if (frame.type !== "state") return;
  const state = frame as StateFrame;
  const cam = state.qualities?.CAM;
  if (cam === undefined || cam === null) return;

  if (!switched) {
    before.push(cam);
    if (before.length >= 5) {
      switched = true;
      switchIteration = state.iteration;
      ws.send(encodeMessage({ type: "set_weight", criterion: "CAM", value: 1.0, id: 1 }));
      console.log(`iteration ${switchIteration}: CAM weight 0 -> 1 (baseline ${mean(before).toFixed(3)})`);
    }
    return;
  }
  if (state.iteration - switchIteration > WINDOW) {
    finish();
    return;
  }
  after.push(cam);
});

function finish(): void {
  const baseline = mean(before);
  const tail = mean(after.slice(-Math.max(3, Math.floor(after.length / 3))));
  console.log(`CAM readout: baseline ${baseline.toFixed(3)} -> tail ${tail.toFixed(3)}`);
  if (tail < baseline) {
    console.log("PASS: crossing-angle quality trended downward after the weight change");
    process.exit(0);
  }
  console.error("FAIL: no downward trend within the window");
  process.exit(1);
}

setTimeout(() => {
  console.error("timed out waiting for quality frames");
  process.exit(1);
}, 180_000);
