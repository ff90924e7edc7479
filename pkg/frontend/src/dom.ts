/** Tiny DOM builder; keeps the views free of innerHTML string assembly. */

export interface ElOptions {
  className?: string;
  text?: string;
  attrs?: Record<string, string>;
  data?: Record<string, string>;
}

export function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  options: ElOptions = {},
  children: (Node | string)[] = [],
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (options.className) node.className = options.className;
  if (options.text !== undefined) node.textContent = options.text;
  for (const [name, value] of Object.entries(options.attrs ?? {})) {
    node.setAttribute(name, value);
  }
  for (const [name, value] of Object.entries(options.data ?? {})) {
    node.dataset[name] = value;
  }
  node.append(...children);
  return node;
}

export const clear = (node: HTMLElement): void => node.replaceChildren();
