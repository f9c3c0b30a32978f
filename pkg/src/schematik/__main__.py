import sys

from schematik.cli import main

sys.exit(main())
