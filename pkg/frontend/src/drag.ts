// Node-drag state machine: press -> pin, move -> pin updates, release ->
// unpin. Pure logic, no DOM; the app feeds it pointer events in world
// coordinates and it emits protocol messages in order.

import { ClientMessage } from "./protocol.js";

export interface DragState {
  node: number | null;
}

export function makeDragState(): DragState {
  return { node: null };
}

export function dragPress(state: DragState, node: number, wx: number, wy: number): ClientMessage[] {
  if (node < 0 || state.node !== null) return [];
  state.node = node;
  return [{ type: "pin_node", node, x: wx, y: wy }];
}

export function dragMove(state: DragState, wx: number, wy: number): ClientMessage[] {
  if (state.node === null) return [];
  return [{ type: "pin_node", node: state.node, x: wx, y: wy }];
}

export function dragRelease(state: DragState): ClientMessage[] {
  if (state.node === null) return [];
  const node = state.node;
  state.node = null;
  return [{ type: "unpin_node", node }];
}
