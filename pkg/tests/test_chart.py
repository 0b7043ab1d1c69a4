from secext import data_file
from secext.chart import ChartSpec, render_chart
from secext.secondary import load_d2


def test_empty_chart_is_header_only():
    text = render_chart(ChartSpec())
    assert text.count("\n") == 1 and text.startswith("# chart")


def test_single_dot():
    text = render_chart(ChartSpec(max_stem=3, max_filt=2, dots={(0, 0): 1}))
    rows = text.splitlines()
    assert rows[3].split()[:2] == ["0", "1"]
    assert rows[1].split()[1] == "."


def test_published_arrows(res35):
    d2 = load_d2(data_file("published-d2.txt"))
    spec = ChartSpec.from_resolution(res35, d2)
    text = render_chart(spec)
    assert sum(1 for l in text.splitlines() if l.startswith("d2 ")) == 12
    spec.format = "svg"
    svg = render_chart(spec)
    assert svg.count('<line class="d2"') == 12
    assert svg.startswith("<?xml") and 'version="1.1"' in svg
    assert render_chart(spec) == svg


def test_chart_dots_are_generator_counts(res35):
    spec = ChartSpec.from_resolution(res35)
    assert spec.dots[(15, 5)] == 2
    assert spec.dots[(0, 14)] == 1
