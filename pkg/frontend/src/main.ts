import { ApiClient } from "./api";
import { App } from "./app";

const api = new ApiClient(import.meta.env?.VITE_API_BASE ?? "");
const root = document.getElementById("app");
if (root) {
  void new App(api, root).start();
}

// keyboard print shortcut works everywhere (browsers also bind Ctrl/Cmd+P natively)
document.addEventListener("keydown", (event) => {
  if ((event.ctrlKey || event.metaKey) && event.key === "p") {
    event.preventDefault();
    window.print();
  }
});
