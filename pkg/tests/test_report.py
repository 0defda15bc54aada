import json
from fractions import Fraction

import pytest

from surgery.errors import PlanSyntaxError, SurgeryError
from surgery.report import (
    Report, format_value, load_kv, parse_kv, render, to_json, to_kv, to_text, write_report,
)


@pytest.fixture
def report():
    r = Report('sample')
    r.set('plumbing.11.1.determinant', 121)
    r.set('case1.descent.square_match', True)
    r.set('certify.min_value', Fraction(198, 121))
    r.set('plumbing.11.1.weights', [-13, -2, -2])
    r.set('relation.1.witness', None)
    return r


class TestValues:
    @pytest.mark.parametrize("value, text", [
        (None, 'none'),
        (True, 'true'),
        (False, 'false'),
        (-36, '-36'),
        (Fraction(-5, 36), '-5/36'),
        ([], 'none'),
        ([1, Fraction(1, 2), True], '1,1/2,true'),
        ('CP²#7CP̄²', 'CP²#7CP̄²'),
    ])
    def test_format_value(self, value, text):
        assert format_value(value) == text


class TestReport:
    def test_order_is_insertion_order(self, report):
        report.set('plumbing.11.1.determinant', -121)
        assert list(report)[0] == 'plumbing.11.1.determinant'
        assert report.text('plumbing.11.1.determinant') == '-121'

    def test_invalid_key(self, report):
        with pytest.raises(SurgeryError, match="invalid report key"):
            report.set('a=b', 1)

    def test_kv(self, report):
        assert to_kv(report).splitlines() == [
            'plumbing.11.1.determinant=121',
            'case1.descent.square_match=true',
            'certify.min_value=198/121',
            'plumbing.11.1.weights=-13,-2,-2',
            'relation.1.witness=none',
        ]

    def test_kv_parse_compares_equal(self, report):
        assert parse_kv(to_kv(report)) == report

    def test_parse_skips_comments(self):
        parsed = parse_kv("# header\n\na=1\nb=x=y\n")
        assert parsed.items() == [('a', '1'), ('b', 'x=y')]

    def test_parse_rejects_bare_line(self):
        with pytest.raises(PlanSyntaxError) as info:
            parse_kv("a=1\nbroken\n")
        assert info.value.line == 2

    def test_text_banner(self, report):
        lines = to_text(report).splitlines()
        assert lines[0] == '=' * 50
        assert lines[1].endswith('REPORT sample')
        assert lines[-1] == '=' * 50
        assert 'certify.min_value' in lines[5]

    def test_json(self, report):
        data = json.loads(to_json(report))
        assert data['name'] == 'sample'
        assert data['entries']['plumbing.11.1.weights'] == '-13,-2,-2'

    def test_binary_formats_are_not_rendered(self, report):
        with pytest.raises(SurgeryError, match="written to a file"):
            render(report, 'pdf')


class TestExports:
    def test_kv_file_round_trip(self, report, tmp_path):
        path = write_report(report, 'kv', tmp_path / 'sample.kv')
        assert load_kv(path) == report

    def test_unknown_format(self, report, tmp_path):
        with pytest.raises(SurgeryError, match="unknown report format"):
            write_report(report, 'csv', tmp_path / 'sample.csv')

    def test_xlsx(self, report, tmp_path):
        openpyxl = pytest.importorskip('openpyxl')
        path = write_report(report, 'xlsx', tmp_path / 'sample.xlsx')
        sheet = openpyxl.load_workbook(path).active
        assert sheet['A1'].value == 'Key'
        assert sheet['A4'].value == 'certify.min_value'
        assert sheet['B4'].value == '198/121'

    def test_pdf(self, report, tmp_path):
        pytest.importorskip('reportlab')
        path = write_report(report, 'pdf', tmp_path / 'sample.pdf')
        assert path.read_bytes().startswith(b'%PDF')
