# -*- coding: UTF-8 -*-
"""workbook - write result tables to an xlsx spreadsheet
"""
import logging
import math
import numbers

import openpyxl
from openpyxl.styles import Font, PatternFill, NamedStyle

logger = logging.getLogger(__name__)

sci_style = NamedStyle(name="sci", number_format="0.00E+00")
rate_style = NamedStyle(name="rate", number_format="0.00")
styles = {
    "sci" : sci_style,
    "rate" : rate_style,
}

BOLD = Font(bold=True)
YELLOW = PatternFill("solid", fgColor="ffffff80")

def mangle_sheet_name(sheet_name):
    "Sheet names cannot be longer than 31 chars"
    return sheet_name[:31]

def munged(row):
    """Translate values which Excel won't store: numpy scalars become
    Python numbers, non-finite floats become empty cells
    """
    out = []
    for cell in row:
        if isinstance(cell, numbers.Integral) and not isinstance(cell, bool):
            cell = int(cell)
        elif isinstance(cell, numbers.Real):
            cell = float(cell)
            if not math.isfinite(cell):
                cell = None
        out.append(cell)
    return out

def xlsx(data_iterator, spreadsheet_filepath):
    """xlsx - put result tables to an xlsx spreadsheet

    Parameters:
        an iterator which will supply [(Sheet Name, [(Column Name, Style)], [Rows]), ...]
            Style is a key of `styles` or None
        spreadsheet_filepath - full path to a spreadsheet

    Yields progress messages.
    """
    wb = openpyxl.Workbook()
    for sheet in list(wb.worksheets):
        wb.remove(sheet)

    for n_sheet, (sheet_name, headers, rowset) in enumerate(data_iterator):
        if sheet_name:
            sheet_name = mangle_sheet_name(sheet_name)
        else:
            sheet_name = u"Sheet %d" % n_sheet
        ws = wb.create_sheet(title=sheet_name)

        #
        # Bold header row on a yellow fill; freeze panes below it
        #
        column_styles = []
        for i, (name, style) in enumerate(headers, 1):
            column_styles.append(styles.get(style))
            cell = ws.cell(column=i, row=1)
            cell.value = name
            cell.font = BOLD
            cell.fill = YELLOW
        ws.freeze_panes = "A2"

        n_rows = 0
        for row in rowset:
            ws.append(munged(row))
            n_rows += 1
        yield "%s: %d rows" % (sheet_name, n_rows)

        #
        # Width each column to its longest value
        #
        for col, style in zip(ws.columns, column_styles):
            max_length = max(len(str(cell.value)) for cell in col)
            ws.column_dimensions[col[0].column_letter].width = (max_length + 2) * 1.2
            if style:
                for cell in col[1:]:
                    cell.style = style

        ws.auto_filter.ref = ws.dimensions

    yield "Save to %s" % spreadsheet_filepath
    wb.save(filename=spreadsheet_filepath)
