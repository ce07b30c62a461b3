from segfd.cli import main

raise SystemExit(main())
