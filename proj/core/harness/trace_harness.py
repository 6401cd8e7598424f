# Copyright 2026 The Chartforge Authors. All Rights Reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Tracing harness executed in an isolated interpreter by chartforge.

Wraps the axes-level chart methods, runs the user script, then renders the
final figure plus one isolation render per traced primitive. Results go to
<out-dir>/scene.json and <out-dir>/image.rgb (raw H*W*3 bytes).
"""

import argparse
import ast
import json
import os
import random
import sys
import traceback

EXIT_SCRIPT_ERROR = 3
EXIT_NO_MARKED_CALLS = 4
EXIT_HARNESS_ERROR = 5

INSTRUMENTED = ("plot", "scatter", "bar", "barh", "hist", "boxplot",
                "errorbar", "pie", "fill", "fill_between", "stackplot",
                "add_patch")


class TraceFailure(Exception):
    def __init__(self, kind, message):
        super().__init__(message)
        self.kind = kind


def fail(out_dir, kind, message, code):
    with open(os.path.join(out_dir, "error.json"), "w") as f:
        json.dump({"kind": kind, "message": message}, f)
    sys.stderr.write(message + "\n")
    sys.exit(code)


def call_spans(source, filename):
    tree = ast.parse(source, filename)
    spans = []
    for node in ast.walk(tree):
        if isinstance(node, ast.Call):
            spans.append((node.lineno, getattr(node, "end_lineno", node.lineno)))
    return spans


def rle_counts(mask):
    # Column-major runs, leading run is background.
    flat = mask.ravel(order="F").astype("int8")
    import numpy as np
    n = flat.size
    change = np.flatnonzero(flat[1:] != flat[:-1]) + 1
    bounds = np.concatenate(([0], change, [n]))
    counts = np.diff(bounds).tolist()
    if flat[0] == 1:
        counts = [0] + counts
    return counts


class Tracer:
    def __init__(self, script_path, source, markers):
        self.script_path = script_path
        self.spans = call_spans(source, script_path)
        self.line_to_marker = {line: mid for mid, line in markers.items()}
        self.markers = markers
        self.calls = []
        self.line_counters = {}
        self.executed_lines = set()
        self.depth = 0

    def start_line(self, lineno):
        best = None
        for start, end in self.spans:
            if start <= lineno <= end and (best is None or start > best):
                best = start
        return lineno if best is None else best

    def caller_line(self):
        frame = sys._getframe(2)
        while frame is not None:
            if frame.f_code.co_filename == self.script_path:
                return self.start_line(frame.f_lineno)
            frame = frame.f_back
        return None

    def wrap(self, name, original):
        tracer = self

        def wrapper(ax, *args, **kwargs):
            if tracer.depth > 0:
                return original(ax, *args, **kwargs)
            line = tracer.caller_line()
            tracer.depth += 1
            try:
                result = original(ax, *args, **kwargs)
            finally:
                tracer.depth -= 1
            count = tracer.line_counters.get(line, 0)
            tracer.line_counters[line] = count + 1
            tracer.calls.append({
                "api": name,
                "line": line,
                "marker": tracer.line_to_marker.get(line),
                "invocation_count": count,
                "axes": ax,
                "kwargs": {k: kwargs[k] for k in ("orientation", "vert")
                           if k in kwargs},
                "result": result,
            })
            return result

        wrapper.__name__ = name
        wrapper.__wrapped__ = original
        return wrapper

    def line_tracer(self, frame, event, arg):
        if frame.f_code.co_filename != self.script_path:
            return None
        if event == "line":
            self.executed_lines.add(frame.f_lineno)
        return self.line_tracer


def visible_linestyle(line):
    ls = line.get_linestyle()
    return ls not in ("None", "none", "", " ") and line.get_linewidth() > 0


def visible_marker(line):
    m = line.get_marker()
    return m not in (None, "None", "none", "", " ") and line.get_markersize() > 0


class MaskRenderer:
    def __init__(self, fig):
        from matplotlib.backends.backend_agg import RendererAgg
        import numpy as np
        self.np = np
        width, height = fig.canvas.get_width_height(physical=True)
        self.width, self.height = int(width), int(height)
        self.renderer = RendererAgg(self.width, self.height, fig.dpi)

    def render(self, artists):
        self.renderer.clear()
        for artist in artists:
            artist.draw(self.renderer)
        rgba = self.np.asarray(self.renderer.buffer_rgba())
        return rgba[:, :, 3] > 0


class SceneBuilder:
    def __init__(self, fig, masks):
        self.fig = fig
        self.masks = masks
        self.primitives = []

    def add(self, call_index, role, index, group, variants):
        pid = "p%d" % len(self.primitives)
        self.primitives.append({
            "id": pid,
            "role": role,
            "call": call_index,
            "index": index,
            "group": group,
            "masks": {k: rle_counts(v) for k, v in variants.items()},
        })
        return pid

    def line_series(self, call_index, line, series, marker_counter):
        ids = []
        has_ls = visible_linestyle(line)
        has_mk = visible_marker(line)
        if has_ls:
            variants = {}
            if has_mk:
                marker = line.get_marker()
                line.set_marker("None")
                variants["line_only"] = self.masks.render([line])
                line.set_marker(marker)
                linestyle = line.get_linestyle()
                line.set_linestyle("None")
                variants["markers_only"] = self.masks.render([line])
                line.set_linestyle(linestyle)
                variants["full"] = (variants["line_only"] |
                                    variants["markers_only"])
            else:
                variants["full"] = self.masks.render([line])
            ids.append(self.add(call_index, "line_path", series, None, variants))
        if has_mk:
            line.set_linestyle("None")
            count = len(line.get_xdata(orig=False))
            for i in range(count):
                line.set_markevery([i])
                ids.append(self.add(call_index, "marker_set", marker_counter[0],
                                    series, {"full": self.masks.render([line])}))
                marker_counter[0] += 1
        return ids

    def scatter_points(self, call_index, coll):
        np = self.masks.np
        offsets = np.asarray(coll.get_offsets())
        sizes = np.asarray(coll.get_sizes())
        face = np.asarray(coll.get_facecolor())
        edge = np.asarray(coll.get_edgecolor())
        widths = np.asarray(coll.get_linewidths())
        paths = coll.get_paths()
        coll.set_array(None)
        ids = []
        for i in range(len(offsets)):
            coll.set_offsets(offsets[i:i + 1])
            if len(sizes):
                coll.set_sizes([sizes[i % len(sizes)]])
            if len(face):
                coll.set_facecolor(face[i % len(face)])
            if len(edge):
                coll.set_edgecolor(edge[i % len(edge)])
            if len(widths):
                coll.set_linewidths([widths[i % len(widths)]])
            if len(paths) > 1:
                coll.set_paths([paths[i % len(paths)]])
            ids.append(self.add(call_index, "marker_set", i, None,
                                {"full": self.masks.render([coll])}))
        return ids

    def patches(self, call_index, role, patches):
        return [self.add(call_index, role, i, None,
                         {"full": self.masks.render([p])})
                for i, p in enumerate(patches)]

    def errorbars(self, call_index, container):
        data_line, caplines, barlinecols = container[0], container[1], container[2]
        ids = []
        if data_line is not None:
            ids += self.line_series(call_index, data_line, 0, [0])
        saved = [list(c.get_segments()) for c in barlinecols]
        count = max((len(s) for s in saved), default=0)
        for i in range(count):
            for coll, segs in zip(barlinecols, saved):
                coll.set_segments([segs[i]] if i < len(segs) else [])
            ids.append(self.add(call_index, "errorbar_line", i, None,
                                {"full": self.masks.render(barlinecols)}))
        for coll, segs in zip(barlinecols, saved):
            coll.set_segments(segs)
        if caplines:
            for i in range(count):
                drawn = []
                for cap in caplines:
                    if i < len(cap.get_xdata(orig=False)):
                        cap.set_markevery([i])
                        drawn.append(cap)
                ids.append(self.add(call_index, "errorbar_cap", i, None,
                                    {"full": self.masks.render(drawn)}))
        return ids

    def boxplot(self, call_index, parts):
        ids = []
        ids += self.patches(call_index, "box_body", parts.get("boxes", []))
        ids += self.patches(call_index, "median", parts.get("medians", []))
        ids += self.patches(call_index, "whisker", parts.get("whiskers", []))
        ids += self.patches(call_index, "cap", parts.get("caps", []))
        return ids

    def primitives_for(self, call_index, call):
        import matplotlib.patches as mpatches
        api, result = call["api"], call["result"]
        if api == "plot":
            counter = [0]
            ids = []
            for series, line in enumerate(result):
                ids += self.line_series(call_index, line, series, counter)
            return ids
        if api == "scatter":
            return self.scatter_points(call_index, result)
        if api in ("bar", "barh"):
            return self.patches(call_index, "bar_patch", list(result.patches))
        if api == "hist":
            flat = []
            stack = [result[2]]
            while stack:
                item = stack.pop(0)
                if isinstance(item, mpatches.Patch):
                    flat.append(item)
                elif hasattr(item, "patches"):
                    flat.extend(item.patches)
                else:
                    stack[0:0] = list(item)
            return self.patches(call_index, "bin_patch", flat)
        if api == "boxplot":
            return self.boxplot(call_index, result)
        if api == "errorbar":
            return self.errorbars(call_index, result)
        if api == "pie":
            return self.patches(call_index, "wedge", list(result[0]))
        if api == "fill":
            return self.patches(call_index, "area_patch", list(result))
        if api == "fill_between":
            return self.patches(call_index, "area_patch", [result])
        if api == "stackplot":
            return self.patches(call_index, "area_patch", list(result))
        if api == "add_patch":
            if isinstance(result, mpatches.Rectangle):
                return self.patches(call_index, "rectangle", [result])
            return []
        return []


def arg_summary(call):
    api, result = call["api"], call["result"]
    summary = {"linestyle": False, "marker": None, "orientation": None}
    line = None
    if api == "plot" and result:
        line = result[0]
    elif api == "errorbar":
        line = result[0]
    if line is not None:
        summary["linestyle"] = bool(visible_linestyle(line))
        if visible_marker(line):
            summary["marker"] = str(line.get_marker())
    if api == "bar":
        summary["orientation"] = "vertical"
    elif api == "barh":
        summary["orientation"] = "horizontal"
    elif api == "hist":
        summary["orientation"] = str(call["kwargs"].get("orientation", "vertical"))
    elif api == "boxplot":
        kw = call["kwargs"]
        if "orientation" in kw:
            summary["orientation"] = str(kw["orientation"])
        elif kw.get("vert", True) is False:
            summary["orientation"] = "horizontal"
        else:
            summary["orientation"] = "vertical"
    return summary


def root_figure(ax):
    try:
        return ax.get_figure(root=True)
    except TypeError:
        return ax.figure


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--script", required=True)
    parser.add_argument("--out-dir", required=True)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--dpi", type=float, default=100.0)
    parser.add_argument("--markers", default="{}")
    args = parser.parse_args()
    out_dir = args.out_dir

    if os.environ.get("CHARTFORGE_HEADLESS") != "1":
        fail(out_dir, "harness_error", "CHARTFORGE_HEADLESS=1 is required",
             EXIT_HARNESS_ERROR)
    os.environ["MPLBACKEND"] = "Agg"

    import matplotlib
    matplotlib.use("Agg", force=True)
    import matplotlib.axes
    import matplotlib.figure
    import matplotlib.pyplot as plt
    import numpy as np

    random.seed(args.seed)
    np.random.seed(args.seed)

    script_path = os.path.abspath(args.script)
    with open(script_path, encoding="utf-8") as f:
        source = f.read()
    markers = json.loads(args.markers)

    try:
        tracer = Tracer(script_path, source, markers)
    except SyntaxError as e:
        fail(out_dir, "script_error", "SyntaxError: %s" % e, EXIT_SCRIPT_ERROR)

    for name in INSTRUMENTED:
        setattr(matplotlib.axes.Axes, name,
                tracer.wrap(name, getattr(matplotlib.axes.Axes, name)))
    plt.show = lambda *a, **k: None
    plt.pause = lambda *a, **k: None
    plt.close = lambda *a, **k: None
    plt.savefig = lambda *a, **k: None
    matplotlib.figure.Figure.savefig = lambda *a, **k: None
    matplotlib.figure.Figure.show = lambda *a, **k: None

    sys.argv = [script_path]
    globals_ = {"__name__": "__main__", "__file__": script_path}
    code = compile(source, script_path, "exec")
    sys.settrace(tracer.line_tracer)
    try:
        exec(code, globals_)
    except SystemExit:
        pass
    except BaseException:
        sys.settrace(None)
        fail(out_dir, "script_error", traceback.format_exc(), EXIT_SCRIPT_ERROR)
    finally:
        sys.settrace(None)

    traced_lines = {c["line"] for c in tracer.calls}
    for mid, line in sorted(markers.items(), key=lambda kv: kv[1]):
        if line in traced_lines:
            continue
        if line in tracer.executed_lines:
            fail(out_dir, "script_error",
                 "marker %s on line %d is not a traced plotting call" % (mid, line),
                 EXIT_SCRIPT_ERROR)
        fail(out_dir, "no_marked_calls",
             "marker %s on line %d was never executed" % (mid, line),
             EXIT_NO_MARKED_CALLS)

    figures = []
    for c in tracer.calls:
        fig = root_figure(c["axes"])
        if all(fig is not f for f in figures):
            figures.append(fig)
    if len(figures) > 1:
        fail(out_dir, "script_error", "traced calls span %d figures" % len(figures),
             EXIT_SCRIPT_ERROR)
    if figures:
        fig = figures[0]
    elif plt.get_fignums():
        fig = plt.gcf()
    else:
        fail(out_dir, "script_error", "script produced no figure", EXIT_SCRIPT_ERROR)

    fig.set_dpi(args.dpi)
    fig.canvas.draw()
    rgba = np.asarray(fig.canvas.buffer_rgba()).astype(np.uint16)
    alpha = rgba[:, :, 3:4]
    rgb = (rgba[:, :, :3] * alpha + 255 * (255 - alpha) + 127) // 255
    rgb = rgb.astype(np.uint8)
    height, width = rgb.shape[0], rgb.shape[1]
    with open(os.path.join(out_dir, "image.rgb"), "wb") as f:
        f.write(rgb.tobytes())

    axes_list = list(fig.axes)
    axes_records = []
    for i, ax in enumerate(axes_list):
        bb = ax.get_window_extent()
        axes_records.append({
            "id": "ax%d" % i,
            "kind": "polar" if ax.name == "polar" else "cartesian",
            "bbox": [float(bb.x0), float(height - bb.y1),
                     float(bb.x1), float(height - bb.y0)],
            "xlim": [float(v) for v in ax.get_xlim()],
            "ylim": [float(v) for v in ax.get_ylim()],
        })

    builder = SceneBuilder(fig, MaskRenderer(fig))
    calls_out = []
    for index, call in enumerate(tracer.calls):
        ax = call["axes"]
        axes_id = ("ax%d" % axes_list.index(ax)) if ax in axes_list else "ax?"
        summary = arg_summary(call)
        prim_ids = builder.primitives_for(index, call)
        calls_out.append({
            "index": index,
            "api": call["api"],
            "line": call["line"],
            "marker": call["marker"],
            "invocation_count": call["invocation_count"],
            "axes_id": axes_id,
            "axes_kind": "polar" if ax.name == "polar" else "cartesian",
            "args": summary,
            "primitives": prim_ids,
        })

    scene = {
        "width": width,
        "height": height,
        "axes": axes_records,
        "calls": calls_out,
        "primitives": builder.primitives,
    }
    with open(os.path.join(out_dir, "scene.json"), "w") as f:
        json.dump(scene, f)


if __name__ == "__main__":
    try:
        main()
    except SystemExit:
        raise
    except BaseException:
        out = None
        for i, a in enumerate(sys.argv):
            if a == "--out-dir" and i + 1 < len(sys.argv):
                out = sys.argv[i + 1]
        message = traceback.format_exc()
        if out:
            fail(out, "harness_error", message, EXIT_HARNESS_ERROR)
        sys.stderr.write(message)
        sys.exit(EXIT_HARNESS_ERROR)
