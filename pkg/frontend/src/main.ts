import { startApp } from "./app.js";

const params = new URLSearchParams(window.location.search);
const url = params.get("ws") ?? "ws://127.0.0.1:8765";

const container = document.getElementById("app");
if (!container) throw new Error("missing #app container");
startApp(url, container);
