/**
 * Application shell: two tabs (design explorer, session runner) over one
 * API client.  The active session id lives in the URL hash, so reloading
 * a `#session/<id>` URL resumes that session from the server.
 */

import type { ApiClient, DesignDoc } from "./api.js";
import { el } from "./dom.js";
import { ExplorerView, type SaveFile } from "./explorer.js";
import { SessionRunnerView, type ClipboardWrite } from "./session.js";

export interface AppHooks {
  saveFile?: SaveFile;
  clipboard?: ClipboardWrite;
}

type TabName = "explorer" | "session";

const SESSION_HASH = /^#session\/([A-Za-z0-9]+)$/;

export class App {
  readonly explorer: ExplorerView;
  readonly session: SessionRunnerView;

  private readonly tabs: Record<TabName, { button: HTMLButtonElement; panel: HTMLElement }>;

  constructor(root: HTMLElement, client: ApiClient, hooks: AppHooks = {}) {
    this.explorer = new ExplorerView(client, {
      saveFile: hooks.saveFile,
      onRunSession: (design: DesignDoc) => {
        this.showTab("session");
        this.session.startFromDesign(design);
      },
    });
    this.session = new SessionRunnerView(client, { clipboard: hooks.clipboard });
    this.session.onSessionChange = (id) => {
      window.location.hash = id === null ? "#session" : `#session/${id}`;
    };

    const tabButton = (name: TabName, label: string): HTMLButtonElement => {
      const button = el("button", {
        className: "tab",
        text: label,
        attrs: { type: "button" },
        data: { role: `tab-${name}` },
      });
      button.addEventListener("click", () => {
        window.location.hash = name === "session" ? "#session" : "#explorer";
        this.showTab(name);
      });
      return button;
    };

    this.tabs = {
      explorer: { button: tabButton("explorer", "design explorer"), panel: this.explorer.root },
      session: { button: tabButton("session", "session runner"), panel: this.session.root },
    };

    root.append(
      el("header", { className: "masthead" }, [
        el("h1", { text: "pooldesign" }),
        el("nav", {}, [this.tabs.explorer.button, this.tabs.session.button]),
      ]),
      this.tabs.explorer.panel,
      this.tabs.session.panel,
    );
    this.boot();
  }

  private boot(): void {
    const match = SESSION_HASH.exec(window.location.hash);
    if (match !== null) {
      this.showTab("session");
      this.session.resume(match[1]);
    } else if (window.location.hash === "#session") {
      this.showTab("session");
    } else {
      this.showTab("explorer");
    }
  }

  showTab(name: TabName): void {
    for (const [tab, parts] of Object.entries(this.tabs)) {
      parts.panel.classList.toggle("hidden", tab !== name);
      parts.button.classList.toggle("active", tab === name);
    }
  }

  /** Resolves once every queued view task has settled; for tests. */
  async idle(): Promise<void> {
    for (;;) {
      await this.explorer.tasks.idle();
      await this.session.tasks.idle();
      if (this.explorer.tasks.size === 0 && this.session.tasks.size === 0) return;
    }
  }
}

export const createApp = (root: HTMLElement, client: ApiClient, hooks: AppHooks = {}): App =>
  new App(root, client, hooks);
