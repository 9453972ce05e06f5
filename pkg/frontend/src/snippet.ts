/** Parse the service's snippet markers ("... [[hit]] ...") into spans. */

export interface SnippetSpan {
  text: string;
  highlight: boolean;
}

export function parseSnippet(snippet: string): SnippetSpan[] {
  const spans: SnippetSpan[] = [];
  let rest = snippet;
  for (;;) {
    const open = rest.indexOf("[[");
    const close = open >= 0 ? rest.indexOf("]]", open + 2) : -1;
    if (open < 0 || close < 0) {
      if (rest) spans.push({ text: rest, highlight: false });
      return spans;
    }
    if (open > 0) spans.push({ text: rest.slice(0, open), highlight: false });
    spans.push({ text: rest.slice(open + 2, close), highlight: true });
    rest = rest.slice(close + 2);
  }
}

export function highlightCount(snippet: string): number {
  return parseSnippet(snippet).filter((s) => s.highlight).length;
}
