import { StudioApi } from "./api.js";
import { StudioApp } from "./app.js";

const app = new StudioApp(new StudioApi(""));
const root = document.getElementById("app");
if (root === null) {
  throw new Error("missing #app mount point");
}
void app.mount(root);
